#include "triage/synth.hpp"

#include "triage/rng.hpp"

#include <array>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace triage {

namespace {

using F = FeatureId;

template <typename T>
using Weighted = std::vector<std::pair<T, double>>;

template <typename T>
const T& choose(Rng& rng, const Weighted<T>& options) {
    double total = 0;
    for (const auto& [_, w] : options) total += w;
    double x = rng.uniform() * total;
    for (const auto& [v, w] : options) {
        if (x < w) return v;
        x -= w;
    }
    return options.back().first;
}

const std::string& pick(Rng& rng, const std::vector<std::string>& words) { return words[rng.below(words.size())]; }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }
double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

std::string two_digits(Rng& rng) {
    const auto n = rng.below(100);
    return std::string{static_cast<char>('0' + n / 10), static_cast<char>('0' + n % 10)};
}

std::string custom_slug(Rng& rng) {
    static constexpr char hex[] = "0123456789abcdef";
    std::string s = "custom-";
    for (int i = 0; i < 6; ++i) s += hex[rng.below(16)];
    return s;
}

const std::vector<std::string> kNewsWords{"news",    "herald", "tribune", "chronicle", "times",  "post",
                                          "gazette", "daily",  "journal", "observer",  "report", "press",
                                          "today",   "courier", "dispatch", "ledger",  "review", "bulletin"};
const std::vector<std::string> kCities{"springfield", "riverside", "fairview", "madison", "georgetown",
                                       "clinton",     "franklin",  "greenville", "bristol", "salem",
                                       "oakland",     "lakeside",  "hudson",   "marion",  "dayton"};
const std::vector<std::string> kSlant{"patriot", "freedom", "truth",    "real",       "liberty", "eagle",
                                      "nation",  "american", "uncensored", "insider", "alert",   "viral",
                                      "breaking", "global",  "conservative", "red"};
const std::vector<std::string> kGeneric{"blue",   "garden", "shop",   "smart", "cloud",  "craft", "pixel",
                                        "green",  "home",   "travel", "recipe", "fitness", "tech", "photo",
                                        "studio", "design", "market", "pet",   "game",   "music", "book",
                                        "auto",   "solar",  "coffee", "yoga",  "bike",   "craft", "learn"};

std::string domain_name(Rng& rng, Label label) {
    std::string name;
    std::string tld;
    switch (label) {
    case Label::disinformation: {
        const double t = rng.uniform();
        if (t < 0.15) name = "channel" + two_digits(rng) + "news";
        else if (t < 0.60) name = pick(rng, kSlant) + pick(rng, kNewsWords);
        else if (t < 0.80) name = pick(rng, kSlant) + pick(rng, kSlant);
        else name = pick(rng, kSlant) + "-" + pick(rng, kNewsWords);
        if (rng.bernoulli(0.12)) name += two_digits(rng);
        tld = choose<std::string>(rng, {{"com", .55}, {"news", .08}, {"xyz", .06}, {"club", .06}, {"online", .04},
                                        {"site", .03}, {"net", .08}, {"org", .05}, {"info", .05}});
        break;
    }
    case Label::news: {
        const double t = rng.uniform();
        if (t < 0.50) name = pick(rng, kCities) + pick(rng, kNewsWords);
        else if (t < 0.70) name = "the" + pick(rng, kCities) + pick(rng, kNewsWords);
        else if (t < 0.85) name = pick(rng, kNewsWords) + pick(rng, kCities);
        else name = pick(rng, kCities) + choose<std::string>(rng, {{"news", .5}, {"tv", .5}});
        if (rng.bernoulli(0.05)) name = pick(rng, kCities) + "-" + pick(rng, kNewsWords);
        tld = choose<std::string>(rng, {{"com", .835}, {"org", .05}, {"net", .05}, {"co.uk", .035}, {"us", .03}});
        break;
    }
    case Label::other: {
        const double t = rng.uniform();
        if (t < 0.80) name = pick(rng, kGeneric) + pick(rng, kGeneric);
        else if (t < 0.90) name = pick(rng, kGeneric) + "-" + pick(rng, kGeneric);
        else name = pick(rng, kGeneric) + two_digits(rng);
        tld = choose<std::string>(rng, {{"com", .60}, {"org", .10}, {"net", .10}, {"io", .08}, {"co", .05},
                                        {"xyz", .04}, {"online", .03}});
        break;
    }
    }
    return name + "." + tld;
}

std::string unique_domain(Rng& rng, Label label, std::set<std::string>& used) {
    std::string domain = domain_name(rng, label);
    if (used.contains(domain)) {
        const auto dot = domain.find('.');
        std::string candidate;
        for (std::size_t k = 2; used.contains(candidate = domain.substr(0, dot) + std::to_string(k) + domain.substr(dot)); ++k) {
        }
        domain = candidate;
    }
    used.insert(domain);
    return domain;
}

struct Provider {
    std::string token;
    std::string country;
};

struct Issuer {
    std::string name;
    std::string country;
    double organization_validated;  // probability the subject carries an O field
    std::vector<double> lifetimes;  // candidate validity periods in days
    bool shared;                    // typically a shared multi-customer certificate
};

const Issuer& issuer_for(Rng& rng, Label label) {
    static const std::vector<Issuer> issuers{
        {"Let's Encrypt", "US", 0.0, {90}, false},
        {"Cloudflare, Inc.", "US", 0.0, {365}, true},
        {"COMODO CA Limited", "GB", 0.0, {180, 365}, true},
        {"cPanel, Inc.", "US", 0.0, {90}, false},
        {"GoDaddy.com, Inc.", "US", 0.1, {365, 730}, false},
        {"Sectigo Limited", "GB", 0.3, {365}, false},
        {"DigiCert Inc", "US", 0.85, {397, 730, 825}, false},
        {"GlobalSign nv-sa", "BE", 0.85, {397, 730}, false},
        {"Amazon", "US", 0.0, {395}, false},
        {"Google Trust Services", "US", 0.0, {90}, false},
    };
    Weighted<std::size_t> w;
    switch (label) {
    case Label::disinformation: w = {{0, .45}, {1, .20}, {2, .12}, {3, .10}, {4, .08}, {5, .05}}; break;
    case Label::news: w = {{6, .32}, {0, .15}, {7, .15}, {5, .12}, {8, .13}, {1, .08}, {4, .05}}; break;
    case Label::other: w = {{0, .33}, {8, .20}, {9, .15}, {6, .12}, {1, .12}, {5, .08}}; break;
    }
    return issuers[choose(rng, w)];
}

// Feature groups drawn from one class profile each.
enum Group { kName, kDns, kWhois, kCert, kHosting, kGroups };

LabeledExample make_example(Rng& rng, Label label, double atypical, std::set<std::string>& used,
                            const ExtractContext& lexical, Timestamp now) {
    // Each group follows the example's own class profile, or with
    // probability `atypical` that of another class, so classes overlap.
    std::array<Label, kGroups> profile;
    for (auto& p : profile) {
        p = label;
        if (rng.bernoulli(atypical)) p = kClassOrder[(index_of(label) + 1 + rng.below(2)) % kClassCount];
    }

    LabeledExample e;
    e.domain = unique_domain(rng, profile[kName], used);
    e.label = label;
    e.source = LabelSource::seed_corpus;
    e.labeled_at = now;
    auto& v = e.features;
    set_lexical_features(v, e.domain, lexical);

    bool d = false, n = false;
    auto as = [&](Group g) {
        label = profile[g];
        d = label == Label::disinformation;
        n = label == Label::news;
    };
    auto rate = [&](double dr, double nr, double orr) { return rng.bernoulli(d ? dr : n ? nr : orr); };

    as(kDns);

    // DNS
    const bool resolves = rate(0.95, 0.99, 0.97);
    v.set_bool(F::domain_resolves, resolves);
    if (resolves || rng.bernoulli(0.5)) {
        static const std::vector<std::pair<std::string, Provider>> ns{
            {"cloudflare.com", {"AS13335", "US"}},   {"domaincontrol.com", {"AS26496", "US"}},
            {"registrar-servers.com", {"AS22612", "US"}}, {"hostgator.com", {"AS46606", "US"}},
            {"bluehost.com", {"AS46606", "US"}},     {"ovh.net", {"AS16276", "FR"}},
            {"nsone.net", {"AS62597", "US"}},        {"qwest.net", {"AS209", "US"}},
            {"akam.net", {"AS20940", "US"}},         {"awsdns-01.com", {"AS16509", "US"}},
            {"ultradns.net", {"AS12008", "US"}},     {"googledomains.com", {"AS15169", "US"}},
        };
        Weighted<std::size_t> w;
        if (d) w = {{0, .30}, {1, .30}, {2, .20}, {3, .08}, {4, .07}, {5, .05}};
        else if (n) w = {{0, .18}, {1, .12}, {6, .18}, {7, .10}, {8, .17}, {9, .12}, {10, .13}};
        else w = {{0, .30}, {9, .22}, {1, .15}, {11, .13}, {2, .08}, {5, .06}, {6, .06}};
        const auto& [sld, p] = ns[choose(rng, w)];
        v.set_category(F::nameserver_sld, sld);
        v.set_category(F::nameserver_as, p.token);
        v.set_category(F::nameserver_country, p.country);
    }

    // WHOIS
    as(kWhois);
    const bool whois = rate(0.85, 0.95, 0.90);
    v.set_bool(F::whois_data_present, whois);
    if (whois) {
        Weighted<std::string> registrars;
        if (d) {
            registrars = {{"GoDaddy.com, LLC", .42}, {"NameCheap, Inc.", .28}, {"eNom, LLC", .14},
                          {"Tucows Domains Inc.", .06}, {"PDR Ltd. d/b/a PublicDomainRegistry.com", .05},
                          {"Name.com, Inc.", .05}};
        } else if (n) {
            registrars = {{"GoDaddy.com, LLC", .38}, {"Network Solutions, LLC", .22}, {"MarkMonitor Inc.", .18},
                          {"CSC Corporate Domains, Inc.", .12}, {"Tucows Domains Inc.", .05},
                          {"NameCheap, Inc.", .03}, {"eNom, LLC", .02}};
        } else {
            registrars = {{"GoDaddy.com, LLC", .35}, {"Google LLC", .15}, {"Tucows Domains Inc.", .12},
                          {"NameCheap, Inc.", .12}, {"MarkMonitor Inc.", .10}, {"Name.com, Inc.", .10},
                          {"Network Solutions, LLC", .06}};
        }
        const std::string registrar = choose(rng, registrars);
        v.set_category(F::registrar_name, registrar);

        const bool privacy = rate(0.57, 0.09, 0.30);
        v.set_bool(F::whois_privacy, privacy);
        std::optional<std::string> org, country;
        if (privacy) {
            if (registrar == "NameCheap, Inc.") {
                org = "WhoisGuard, Inc.";
                country = "PA";
            } else if (registrar == "GoDaddy.com, LLC") {
                org = "Domains By Proxy, LLC";
                country = "US";
            } else if (rng.bernoulli(0.5)) {
                org = "Privacy Protect, LLC";
                country = "US";
            } else {
                org = "REDACTED FOR PRIVACY";
            }
        } else if (d) {
            if (rng.bernoulli(0.5)) org = pick(rng, kSlant) + " media llc";
            country = choose<std::optional<std::string>>(
                rng, {{"US", .60}, {"CA", .05}, {"GB", .05}, {"MK", .05}, {"RU", .05}, {std::nullopt, .20}});
        } else if (n) {
            if (rng.bernoulli(0.5)) {
                org = choose<std::string>(rng, {{"Gannett Co., Inc.", .3}, {"Lee Enterprises", .25},
                                                {"Sinclair Broadcast Group", .2}, {"Tribune Publishing", .15},
                                                {"McClatchy", .1}});
            } else {
                org = pick(rng, kCities) + " publishing co.";
            }
            country = choose<std::optional<std::string>>(rng, {{"US", .90}, {"GB", .04}, {"CA", .03}, {std::nullopt, .03}});
        } else {
            if (rng.bernoulli(0.7)) org = pick(rng, kGeneric) + " inc.";
            country = choose<std::optional<std::string>>(
                rng, {{"US", .60}, {"GB", .08}, {"DE", .08}, {"CA", .06}, {"IN", .06}, {std::nullopt, .12}});
        }
        v.set_category(F::registrant_org, org);
        v.set_category(F::registrant_country, country);

        double age, to_expiry;
        if (d) {
            age = log_uniform(rng, 15, 1500);
            to_expiry = rng.bernoulli(0.75) ? uniform(rng, 10, 365) : uniform(rng, 365, 1100);
        } else if (n) {
            age = log_uniform(rng, 1200, 9500);
            to_expiry = rng.bernoulli(0.6) ? uniform(rng, 365, 3650) : uniform(rng, 30, 365);
        } else {
            age = log_uniform(rng, 150, 7000);
            to_expiry = uniform(rng, 30, 1460);
        }
        age = std::floor(age);
        to_expiry = std::floor(to_expiry);
        v.set_numeric(F::time_since_registration, age);
        v.set_numeric(F::time_to_expiration, to_expiry);
        v.set_numeric(F::domain_lifespan, age + to_expiry);
        const double update_window = std::min(age, d ? 365.0 : n ? 900.0 : 700.0);
        v.set_numeric(F::time_since_update, std::floor(uniform(rng, 0, update_window)));
    }

    // Certificate
    as(kCert);
    const bool cert = resolves && rate(0.72, 0.85, 0.78);
    v.set_bool(F::cert_available, cert);
    v.set_bool(F::cert_data_present, cert);
    if (cert) {
        const Issuer& is = issuer_for(rng, label);
        const bool self_signed = rng.bernoulli(0.02);
        v.set_bool(F::self_signed, self_signed);
        v.set_category(F::issuer_name, self_signed ? e.domain : is.name);
        if (!self_signed) v.set_category(F::issuer_country, is.country);
        const bool ov = rng.bernoulli(n ? std::min(1.0, is.organization_validated + 0.1) : is.organization_validated);
        v.set_bool(F::domain_validated, !self_signed && !ov);
        v.set_numeric(F::cert_lifetime, self_signed ? 365.0 : is.lifetimes[rng.below(is.lifetimes.size())]);
        v.set_bool(F::cert_expired, rng.bernoulli(0.03));

        double sans;
        if (is.shared && !n) sans = std::floor(uniform(rng, 10, 60));
        else if (d) sans = static_cast<double>(1 + rng.below(3));
        else if (n) sans = rng.bernoulli(0.45) ? static_cast<double>(2 + rng.below(2)) : std::floor(log_uniform(rng, 5, 150));
        else sans = rng.bernoulli(0.8) ? static_cast<double>(1 + rng.below(10)) : std::floor(uniform(rng, 10, 60));
        v.set_numeric(F::san_count, sans);
        v.set_bool(F::san_wildcard, rate(0.15, 0.45, 0.35) || (is.shared && rng.bernoulli(0.3)));
    }

    // Hosting
    as(kHosting);
    if (resolves) {
        static const std::vector<Provider> hosts{
            {"AS26496", "US"}, {"AS22612", "US"}, {"AS13335", "US"}, {"AS46606", "US"}, {"AS16276", "FR"},
            {"AS14061", "US"}, {"AS19551", "US"}, {"AS20940", "US"}, {"AS54113", "US"}, {"AS16509", "US"},
            {"AS15169", "US"}, {"AS209", "US"},
        };
        Weighted<std::size_t> w;
        if (d) w = {{0, .25}, {1, .17}, {2, .30}, {3, .12}, {4, .08}, {5, .08}};
        else if (n) w = {{6, .18}, {7, .20}, {8, .17}, {2, .15}, {9, .15}, {10, .05}, {11, .05}, {0, .05}};
        else w = {{9, .28}, {10, .17}, {2, .20}, {8, .08}, {5, .10}, {4, .07}, {0, .10}};
        const auto& host = hosts[choose(rng, w)];
        v.set_category(F::website_as, host.token);
        std::string country = host.country;
        if (host.token == "AS14061") country = choose<std::string>(rng, {{"US", .5}, {"NL", .25}, {"DE", .25}});
        if (d && rng.bernoulli(0.08)) country = choose<std::string>(rng, {{"BG", .4}, {"RU", .3}, {"MK", .3}});
        v.set_category(F::website_country, country);
    }
    const bool available = resolves && rate(0.90, 0.97, 0.93);
    v.set_bool(F::website_available, available);
    v.set_bool(F::hosting_data_present, available);
    if (available) {
        const bool wp = rate(0.82, 0.20, 0.30);
        v.set_bool(F::wordpress_cms, wp);
        std::vector<std::string> plugins;
        if (wp) {
            Weighted<std::string> rates;
            if (d) {
                rates = {{"wordpress-seo", .55}, {"jetpack", .50}, {"contact-form-7", .50}, {"akismet", .35},
                         {"facebook-comments", .20}, {"wp-super-cache", .25}};
            } else if (n) {
                rates = {{"akismet", .15}, {"jetpack", .10}, {"wordpress-seo", .10}, {"wp-super-cache", .20}};
            } else {
                rates = {{"contact-form-7", .35}, {"akismet", .30}, {"woocommerce", .35}, {"elementor", .30},
                         {"wordpress-seo", .25}};
            }
            for (const auto& [slug, p] : rates) {
                if (rng.bernoulli(p)) plugins.push_back(slug);
            }
            if (!rng.bernoulli(0.05)) {
                Weighted<std::string> themes;
                if (d) themes = {{"Newspaper", .25}, {"Newsmag", .15}, {"mh-magazine", .10}, {"mts-best", .05}, {"", .45}};
                else if (n) themes = {{"Newspaper", .05}, {"twentyseventeen", .10}, {"jnews", .10}, {"", .75}};
                else themes = {{"astra", .25}, {"twentyseventeen", .20}, {"Divi", .15}, {"", .40}};
                std::string theme = choose(rng, themes);
                v.set_category(F::wp_theme, theme.empty() ? custom_slug(rng) : theme);
            }
        }
        v.set_tokens(F::wp_plugins, plugins);
    }
    return e;
}

}  // namespace

std::vector<LabeledExample> synth_dataset(const SynthOptions& options, const ExtractContext& lexical) {
    Rng rng(options.seed);
    std::vector<LabeledExample> out;
    out.reserve(options.per_class * kClassCount);
    std::set<std::string> used;
    for (auto label : kClassOrder) {
        for (std::size_t i = 0; i < options.per_class; ++i) {
            out.push_back(make_example(rng, label, options.atypical, used, lexical, options.now));
        }
    }
    return out;
}

}  // namespace triage
