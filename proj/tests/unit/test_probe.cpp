#include "triage/probe.hpp"
#include "triage/rng.hpp"
#include "triage/serialize.hpp"
#include "triage/text.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace triage;
using namespace std::chrono;
using testing_support::corpus_dir;
using testing_support::replay_day;

namespace {

std::vector<std::uint8_t> der_of(const std::filesystem::path& pem) {
    auto der = pem_to_der(read_file(pem));
    EXPECT_TRUE(der) << pem;
    return der.value_or(std::vector<std::uint8_t>{});
}

FixtureTransport transport() { return FixtureTransport(corpus_dir() / "sites"); }

}  // namespace

TEST(Whois, ParsesCreationDateAndPrivacyOrg) {
    const auto w = parse_whois("Domain Name: X.COM\nCreation Date: 2010-05-01T00:00:00Z\n"
                               "Registrant Organization: WhoisGuard, Inc.\nRegistrar: NameCheap, Inc.\n");
    EXPECT_TRUE(w.available);
    EXPECT_EQ(w.created, Date{year{2010} / 5 / 1});
    EXPECT_EQ(w.registrant_org, "WhoisGuard, Inc.");
    EXPECT_EQ(w.registrar, "NameCheap, Inc.");
}

TEST(Whois, EmptyTextIsUnavailable) {
    const auto w = parse_whois("");
    EXPECT_FALSE(w.available);
    EXPECT_FALSE(w.registrar || w.registrant_org || w.registrant_country || w.created || w.updated || w.expires);
}

TEST(Whois, FirstMatchingLineWinsAndAliasesApply) {
    const auto w = parse_whois("% comment\nSponsoring Registrar: First\nRegistrar: Second\n"
                               "Registered on: 12-Mar-2001\nExpiry date: 12-Mar-2021\nCountry: GB\n");
    EXPECT_EQ(w.registrar, "First");
    EXPECT_EQ(w.created, Date{year{2001} / 3 / 12});
    EXPECT_EQ(w.expires, Date{year{2021} / 3 / 12});
    EXPECT_EQ(w.registrant_country, "GB");
}

TEST(Whois, DateFormats) {
    const Date d{year{2019} / 2 / 1};
    for (const char* s : {"2019-02-01", "2019-02-01T10:11:12Z", "2019-02-01 10:11:12", "01-Feb-2019", "2019.02.01",
                          "2019/02/01"}) {
        EXPECT_EQ(parse_whois_date(s), d) << s;
    }
    EXPECT_FALSE(parse_whois_date("sometime"));
}

TEST(Whois, TotalOnArbitraryBytes) {
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        std::string s(rng.below(300), '\0');
        for (auto& c : s) c = static_cast<char>(rng.below(256));
        if (rng.bernoulli(0.5)) s = "Creation Date: " + s + "\nRegistrar:" + s;
        EXPECT_NO_THROW(parse_whois(s));
    }
}

TEST(Certificate, SanListFromFixture) {
    const auto c = parse_certificate(der_of(corpus_dir() / "certs" / "example.pem"));
    EXPECT_TRUE(c.available);
    EXPECT_FALSE(c.parse_error);
    EXPECT_EQ(c.san_entries, (std::vector<std::string>{"example.com", "www.example.com"}));
    EXPECT_EQ(c.issuer_name, "Let's Encrypt");
    EXPECT_EQ(c.issuer_country, "US");
    EXPECT_FALSE(c.self_signed);
    ASSERT_TRUE(c.not_before && c.not_after);
    EXPECT_EQ(floor_days(*c.not_before, *c.not_after), 90);
}

TEST(Certificate, SelfIssuedFixtureIsSelfSigned) {
    const auto c = parse_certificate(der_of(corpus_dir() / "sites" / "empirenews.net" / "cert.pem"));
    EXPECT_TRUE(c.self_signed);
    EXPECT_EQ(c.subject_cn, "empirenews.net");
}

TEST(Certificate, ZeroValidityWindow) {
    const auto c = parse_certificate(der_of(corpus_dir() / "certs" / "zero_lifetime.pem"));
    ASSERT_TRUE(c.not_before && c.not_after);
    EXPECT_EQ(*c.not_before, *c.not_after);
}

TEST(Certificate, TotalOnArbitraryAndMutatedBytes) {
    const auto good = der_of(corpus_dir() / "certs" / "example.pem");
    Rng rng(2);
    for (int i = 0; i < 3000; ++i) {
        std::vector<std::uint8_t> bytes;
        if (rng.bernoulli(0.5)) {
            bytes = good;
            for (int k = 0; k < 1 + static_cast<int>(rng.below(8)); ++k) {
                bytes[rng.below(bytes.size())] = static_cast<std::uint8_t>(rng.below(256));
            }
            if (rng.bernoulli(0.3)) bytes.resize(rng.below(bytes.size()));
        } else {
            bytes.resize(rng.below(400));
            for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.below(256));
        }
        const auto c = parse_certificate(bytes);
        EXPECT_TRUE(c.available);
    }
    EXPECT_TRUE(parse_certificate({}).parse_error);
}

TEST(Probe, FullFixtureHasAllSections) {
    auto t = transport();
    const auto r = probe_domain("channel24news.com", t, ProbeLimits{}, replay_day());
    EXPECT_TRUE(r.dns.resolves);
    EXPECT_TRUE(r.whois.available);
    EXPECT_TRUE(r.cert.available);
    EXPECT_TRUE(r.http.available);
    EXPECT_EQ(r.cert.san_entries.size(), 2u);
}

TEST(Probe, RefusingFixtureIsAllUnavailable) {
    auto t = transport();
    const auto r = probe_domain("homegarden.com", t, ProbeLimits{}, replay_day());
    EXPECT_EQ(r, unavailable_record("homegarden.com", replay_day()));
    EXPECT_FALSE(r.dns.resolves);
    EXPECT_FALSE(r.whois.available || r.cert.available || r.http.available);
}

TEST(Probe, HttpsFailureFallsBackToHttp) {
    auto t = transport();
    const auto r = probe_domain("daytonledger.com", t, ProbeLimits{}, replay_day());
    EXPECT_FALSE(r.cert.available);
    EXPECT_TRUE(r.http.available);
    EXPECT_EQ(r.http.final_url, "http://daytonledger.com/");
}

TEST(Probe, FollowsRedirectChain) {
    auto t = transport();
    const auto r = probe_domain("madisonchronicle.com", t, ProbeLimits{}, replay_day());
    EXPECT_TRUE(r.http.available);
    EXPECT_EQ(r.http.redirect_count, 2);
    EXPECT_EQ(r.http.final_url, "https://madisonchronicle.com/en/");

    ProbeLimits tight;
    tight.max_redirects = 1;
    const auto capped = probe_domain("madisonchronicle.com", t, tight, replay_day());
    EXPECT_FALSE(capped.http.available);
}

TEST(Probe, MalformedCertificateIsAvailableWithParseError) {
    auto t = transport();
    const auto r = probe_domain("craftpixel.io", t, ProbeLimits{}, replay_day());
    EXPECT_TRUE(r.cert.available);
    EXPECT_TRUE(r.cert.parse_error);
}

TEST(Probe, StallingSubProbeRespectsTimeout) {
    auto t = transport();
    ProbeLimits limits;
    limits.timeout = milliseconds(150);
    const auto start = steady_clock::now();
    const auto r = probe_domain("solarcoffee.com", t, limits, replay_day());
    const auto elapsed = duration_cast<milliseconds>(steady_clock::now() - start);
    EXPECT_FALSE(r.http.available);
    EXPECT_TRUE(r.whois.available);
    // Two HTTP attempts (https, then http) each bounded by the timeout.
    EXPECT_LT(elapsed, 2 * limits.timeout + milliseconds(200));
}

TEST(Probe, BodyIsTruncatedAtCap) {
    auto t = transport();
    for (std::size_t cap : {1000u, 65536u, 512u * 1024u}) {
        ProbeLimits limits;
        limits.body_cap = cap;
        const auto r = probe_domain("bikecoffee.com", t, limits, replay_day());
        ASSERT_TRUE(r.http.body);
        EXPECT_EQ(r.http.body->size(), cap);
    }
}

TEST(Probe, DeterministicSerialization) {
    auto t = transport();
    for (const char* d : {"channel24news.com", "empirenews.net", "craftpixel.io", "homegarden.com"}) {
        const auto a = to_json(probe_domain(d, t, ProbeLimits{}, replay_day())).dump();
        const auto b = to_json(probe_domain(d, t, ProbeLimits{}, replay_day())).dump();
        EXPECT_EQ(a, b) << d;
    }
}

TEST(Probe, RecordJsonRoundTrips) {
    auto t = transport();
    for (const char* d : {"channel24news.com", "empirenews.net", "craftpixel.io", "daytonledger.com"}) {
        const auto r = probe_domain(d, t, ProbeLimits{}, replay_day());
        EXPECT_EQ(probe_record_from_json(to_json(r)), r) << d;
    }
}

TEST(Probe, ProbeManyKeepsOrder) {
    auto t = transport();
    const std::vector<std::string> domains{"empirenews.net", "homegarden.com", "channel24news.com", "bluegarden.com"};
    const auto records = probe_many(domains, t, ProbeLimits{}, replay_day(), 4);
    ASSERT_EQ(records.size(), domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i) {
        EXPECT_EQ(records[i], probe_domain(domains[i], t, ProbeLimits{}, replay_day()));
    }
}
