#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace trollscope {

/// The eight account categories of the labeled tweet data set, in declaration order.
/// Declaration order is the tie-break order used by every classifier and report.
enum class AccountCategory : std::uint8_t {
    Commercial,
    Fearmonger,
    HashtagGamer,
    LeftTroll,
    NewsFeed,
    NonEnglish,
    RightTroll,
    Unknown,
};

inline constexpr std::size_t kCategoryCount = 8;

inline constexpr std::array<AccountCategory, kCategoryCount> kAllCategories = {
    AccountCategory::Commercial, AccountCategory::Fearmonger, AccountCategory::HashtagGamer,
    AccountCategory::LeftTroll,  AccountCategory::NewsFeed,   AccountCategory::NonEnglish,
    AccountCategory::RightTroll, AccountCategory::Unknown,
};

std::string_view to_string(AccountCategory c) noexcept;

/// Accepts the canonical names ("RightTroll") and the spaced display names
/// ("Right Troll", "Hashtag Gamer", "Non-English"). Anything else is nullopt.
std::optional<AccountCategory> try_parse_category(std::string_view text) noexcept;

/// Throws Error{UnknownCategory}.
AccountCategory parse_category(std::string_view text);

}  // namespace trollscope
