#pragma once

// Token-level helpers shared by the model file readers and writers.

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>

#include "trollscope/error.hpp"

namespace trollscope::serial {

inline std::string hex(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::hex);
    return std::string(buf, end);
}

inline std::string hex(std::uint64_t x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, 16);
    return std::string(buf, end);
}

class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) fail("unexpected end of file");
        return w;
    }

    void expect(std::string_view keyword) {
        const auto w = word();
        if (w != keyword) fail("expected '" + std::string(keyword) + "', found '" + w + "'");
    }

    double real() {
        const auto w = word();
        double x = 0.0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), x, std::chars_format::hex);
        if (ec != std::errc{} || p != w.data() + w.size()) fail("bad real '" + w + "'");
        return x;
    }

    std::uint64_t uint(int base = 10) {
        const auto w = word();
        std::uint64_t x = 0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), x, base);
        if (ec != std::errc{} || p != w.data() + w.size()) fail("bad integer '" + w + "'");
        return x;
    }

    std::int64_t sint() {
        const auto w = word();
        std::int64_t x = 0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
        if (ec != std::errc{} || p != w.data() + w.size()) fail("bad integer '" + w + "'");
        return x;
    }

    [[noreturn]] static void fail(const std::string& what) {
        throw Error(ErrorCode::BadModelFile, what);
    }

private:
    std::istream& in_;
};

}  // namespace trollscope::serial
