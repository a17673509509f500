#include "triage/error.hpp"
#include "triage/labels.hpp"
#include "triage/text.hpp"
#include "triage/time.hpp"

#include <gtest/gtest.h>

using namespace triage;
using namespace std::chrono;

TEST(Time, ParsesDateAndTimestampForms) {
    const Timestamp day = sys_days{year{2019} / 2 / 1};
    EXPECT_EQ(parse_iso8601("2019-02-01"), day);
    EXPECT_EQ(parse_iso8601("2019-02-01T00:00:00Z"), day);
    EXPECT_EQ(parse_iso8601("2019-02-01 03:04:05"), day + hours{3} + minutes{4} + seconds{5});
    EXPECT_EQ(parse_iso8601("2019-02-01T03:04:05.123Z"), day + hours{3} + minutes{4} + seconds{5});
    EXPECT_EQ(parse_iso8601("2019-02-01T03:00:00+02:00"), day + hours{1});
    EXPECT_EQ(parse_iso8601("2019-02-01T03:00:00-0130"), day + hours{4} + minutes{30});
}

TEST(Time, RejectsMalformedTimestamps) {
    for (const char* bad : {"", "2019", "2019-13-01", "2019-02-30", "2019/02/01", "2019-02-01T25:00:00Z",
                            "2019-02-01Tgarbage", "2019-02-01T00:00:00Zx"}) {
        EXPECT_FALSE(parse_iso8601(bad)) << bad;
    }
}

TEST(Time, FormatRoundTripsAndFloorDays) {
    const Timestamp t = sys_days{year{2020} / 2 / 29} + hours{23} + minutes{59} + seconds{59};
    EXPECT_EQ(format_iso8601(t), "2020-02-29T23:59:59Z");
    EXPECT_EQ(parse_iso8601(format_iso8601(t)), t);
    EXPECT_EQ(floor_days(t, t + hours{47}), 1);
    EXPECT_EQ(floor_days(t, t - hours{1}), -1);
    EXPECT_EQ(floor_days(t, t), 0);
}

TEST(Text, LowerTrimSplit) {
    EXPECT_EQ(to_lower("WwW.Example.COM"), "www.example.com");
    EXPECT_EQ(trim("  \tabc \r\n"), "abc");
    const auto parts = split("a.b..c", '.');
    ASSERT_EQ(parts.size(), 4u);
    EXPECT_EQ(parts[2], "");
    EXPECT_TRUE(icontains("WhoisGuard, Inc.", "GUARD"));
    EXPECT_FALSE(icontains("abc", "abcd"));
}

TEST(Labels, ParseAndArgmaxTieBreak) {
    EXPECT_EQ(parse_label("news"), Label::news);
    EXPECT_FALSE(parse_label("satire"));
    EXPECT_EQ(argmax({0.5, 0.5, 0.0}), Label::disinformation);
    EXPECT_EQ(argmax({0.2, 0.4, 0.4}), Label::news);
    EXPECT_EQ(argmax({0.1, 0.2, 0.7}), Label::other);
}
