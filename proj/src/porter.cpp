// English Snowball stemmer (Porter2).
//
// R1 is the region after the first non-vowel following a vowel, R2 the same
// region taken again inside R1. Each step finds the longest listed suffix and
// applies its rule only when the rule's condition holds.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include "trollscope/textprep.hpp"

namespace trollscope {

namespace {

bool vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }

bool ends_with(const std::string& w, std::string_view s) {
    return w.size() >= s.size() && std::string_view(w).substr(w.size() - s.size()) == s;
}

bool double_consonant(std::string_view w) {
    if (w.size() < 2 || w[w.size() - 1] != w[w.size() - 2]) return false;
    switch (w.back()) {
        case 'b': case 'd': case 'f': case 'g': case 'm': case 'n': case 'p': case 'r': case 't': return true;
        default: return false;
    }
}

bool valid_li(char c) {
    switch (c) {
        case 'c': case 'd': case 'e': case 'g': case 'h': case 'k': case 'm': case 'n': case 'r': case 't': return true;
        default: return false;
    }
}

class Stemmer {
public:
    explicit Stemmer(std::string word) : w_(std::move(word)) {}

    std::string run() {
        if (w_.size() <= 2) return w_;
        if (const auto special = exception1()) return *special;
        if (w_.front() == '\'') w_.erase(0, 1);
        if (w_.empty()) return w_;
        mark_y();
        regions();
        step0();
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5();
        return restore();
    }

private:
    std::string w_;
    std::size_t r1_ = 0;
    std::size_t r2_ = 0;

    bool v(std::size_t i) const { return vowel(w_[i]); }

    const std::string* exception1() const {
        static const std::array<std::pair<std::string, std::string>, 15> table = {{
            {"skis", "ski"}, {"skies", "sky"}, {"idly", "idl"}, {"gently", "gentl"}, {"ugly", "ugli"},
            {"early", "earli"}, {"only", "onli"},
            {"singly", "singl"}, {"sky", "sky"}, {"news", "news"}, {"howe", "howe"}, {"atlas", "atlas"},
            {"cosmos", "cosmos"}, {"bias", "bias"}, {"andes", "andes"},
        }};
        for (const auto& [from, to] : table) {
            if (w_ == from) return &to;
        }
        return nullptr;
    }

    void mark_y() {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            if (w_[i] == 'y' && (i == 0 || vowel(w_[i - 1]))) w_[i] = 'Y';
        }
    }

    std::string restore() {
        for (auto& c : w_) {
            if (c == 'Y') c = 'y';
        }
        return w_;
    }

    std::size_t region_after(std::size_t from) const {
        for (std::size_t i = from + 1; i < w_.size(); ++i) {
            if (!v(i) && v(i - 1)) return i + 1;
        }
        return w_.size();
    }

    void regions() {
        static const std::array<std::string_view, 9> prefixes = {"arsen", "commun", "emerg", "gener", "inter",
                                                                 "later", "organ",  "past",  "univers"};
        r1_ = region_after(0);
        for (auto p : prefixes) {
            if (std::string_view(w_).substr(0, p.size()) == p) r1_ = p.size();
        }
        r2_ = r1_ < w_.size() ? region_after(r1_) : w_.size();
        if (r2_ < r1_) r2_ = r1_;
    }

    bool in_r1(std::size_t suffix_len) const { return w_.size() - suffix_len >= r1_; }
    bool in_r2(std::size_t suffix_len) const { return w_.size() - suffix_len >= r2_; }

    void chop(std::size_t n) { w_.erase(w_.end() - static_cast<std::ptrdiff_t>(n), w_.end()); }
    void replace(std::size_t n, std::string_view with) {
        chop(n);
        w_ += with;
    }

    bool short_syllable_at_end(std::string_view s) const {
        const auto n = s.size();
        if (n >= 4 && s.substr(n - 4) == "past") return true;
        if (n == 2) return vowel(s[0]) && !vowel(s[1]);
        if (n < 3) return false;
        const char c = s[n - 1];
        return !vowel(s[n - 3]) && vowel(s[n - 2]) && !vowel(c) && c != 'w' && c != 'x' && c != 'Y';
    }

    bool has_vowel(std::size_t end) const {
        for (std::size_t i = 0; i < end; ++i) {
            if (v(i)) return true;
        }
        return false;
    }

    template <std::size_t N>
    std::string_view longest(const std::array<std::string_view, N>& suffixes) const {
        std::string_view best;
        for (auto s : suffixes) {
            if (s.size() > best.size() && ends_with(w_, s)) best = s;
        }
        return best;
    }

    void step0() {
        for (std::string_view s : {"'s'", "'s", "'"}) {
            if (ends_with(w_, s)) {
                chop(s.size());
                return;
            }
        }
    }

    void step1a() {
        if (ends_with(w_, "sses")) {
            replace(4, "ss");
        } else if (ends_with(w_, "ied") || ends_with(w_, "ies")) {
            replace(3, w_.size() > 4 ? "i" : "ie");
        } else if (ends_with(w_, "us") || ends_with(w_, "ss")) {
        } else if (ends_with(w_, "s")) {
            if (w_.size() >= 3 && has_vowel(w_.size() - 2)) chop(1);
        }
    }

    void step1b() {
        static constexpr std::array<std::string_view, 6> suffixes = {"eed", "eedly", "ed", "edly", "ing", "ingly"};
        const auto s = longest(suffixes);
        if (s.empty()) return;
        const auto stem_len = w_.size() - s.size();
        const std::string_view before(w_.data(), stem_len);
        if (s == "eed" || s == "eedly") {
            if (in_r1(s.size()) && before != "succ" && before != "proc" && before != "exc") replace(s.size(), "ee");
            return;
        }
        if (s == "ing") {
            for (std::string_view keep : {"even", "cann", "inn", "earr", "herr", "out"}) {
                if (before == keep) return;
            }
            if (stem_len == 2 && before[1] == 'y' && !vowel(before[0])) {
                replace(s.size() + 1, "ie");
                return;
            }
        }
        if (!has_vowel(stem_len)) return;
        chop(s.size());
        if (ends_with(w_, "at") || ends_with(w_, "bl") || ends_with(w_, "iz")) {
            w_ += 'e';
        } else if (double_consonant(w_)) {
            const char first = w_[0];
            if (!(w_.size() == 3 && (first == 'a' || first == 'e' || first == 'o'))) chop(1);
        } else if (r1_ == w_.size() && short_syllable_at_end(w_)) {
            w_ += 'e';
        }
    }

    void step1c() {
        const auto n = w_.size();
        if (n > 2 && (w_[n - 1] == 'y' || w_[n - 1] == 'Y') && !vowel(w_[n - 2])) w_[n - 1] = 'i';
    }

    void step2() {
        static constexpr std::array<std::string_view, 25> suffixes = {
            "tional", "enci",  "anci",   "abli",    "entli", "izer",   "ization", "ational",
            "ation",  "ator",  "alism",  "aliti",   "alli",  "fulness", "ousli",  "ousness",
            "iveness", "iviti", "biliti", "bli",    "ogi",   "fulli",  "lessli",  "li",      "ogist"};
        const auto s = longest(suffixes);
        if (s.empty() || !in_r1(s.size())) return;
        if (s == "tional") replace(s.size(), "tion");
        else if (s == "enci") replace(s.size(), "ence");
        else if (s == "anci") replace(s.size(), "ance");
        else if (s == "abli") replace(s.size(), "able");
        else if (s == "entli") replace(s.size(), "ent");
        else if (s == "izer" || s == "ization") replace(s.size(), "ize");
        else if (s == "ational" || s == "ation" || s == "ator") replace(s.size(), "ate");
        else if (s == "alism" || s == "aliti" || s == "alli") replace(s.size(), "al");
        else if (s == "fulness") replace(s.size(), "ful");
        else if (s == "ousli" || s == "ousness") replace(s.size(), "ous");
        else if (s == "iveness" || s == "iviti") replace(s.size(), "ive");
        else if (s == "biliti" || s == "bli") replace(s.size(), "ble");
        else if (s == "ogist") replace(s.size(), "og");
        else if (s == "ogi") {
            if (w_.size() > 3 && w_[w_.size() - 4] == 'l') replace(s.size(), "og");
        } else if (s == "fulli") replace(s.size(), "ful");
        else if (s == "lessli") replace(s.size(), "less");
        else if (s == "li") {
            if (w_.size() > 2 && valid_li(w_[w_.size() - 3])) chop(2);
        }
    }

    void step3() {
        static constexpr std::array<std::string_view, 9> suffixes = {"tional", "ational", "alize", "icate", "iciti",
                                                                     "ical",   "ful",     "ness",  "ative"};
        const auto s = longest(suffixes);
        if (s.empty() || !in_r1(s.size())) return;
        if (s == "tional") replace(s.size(), "tion");
        else if (s == "ational") replace(s.size(), "ate");
        else if (s == "alize") replace(s.size(), "al");
        else if (s == "icate" || s == "iciti" || s == "ical") replace(s.size(), "ic");
        else if (s == "ful" || s == "ness") chop(s.size());
        else if (s == "ative") {
            if (in_r2(s.size())) chop(s.size());
        }
    }

    void step4() {
        static constexpr std::array<std::string_view, 18> suffixes = {
            "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement",
            "ment", "ent", "ism",  "ate", "iti", "ous",  "ive",  "ize", "ion"};
        const auto s = longest(suffixes);
        if (s.empty() || !in_r2(s.size())) return;
        if (s == "ion") {
            if (w_.size() > 3) {
                const char c = w_[w_.size() - 4];
                if (c == 's' || c == 't') chop(3);
            }
            return;
        }
        chop(s.size());
    }

    void step5() {
        if (ends_with(w_, "e")) {
            if (in_r2(1)) {
                chop(1);
            } else if (in_r1(1) && !short_syllable_at_end(std::string_view(w_).substr(0, w_.size() - 1))) {
                chop(1);
            }
        } else if (ends_with(w_, "l")) {
            if (in_r2(1) && w_.size() > 1 && w_[w_.size() - 2] == 'l') chop(1);
        }
    }
};

}  // namespace

std::string stem(std::string_view token) { return Stemmer(std::string(token)).run(); }

}  // namespace trollscope
