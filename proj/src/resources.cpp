#include "triage/resources.hpp"

#include "triage/text.hpp"

#include <cstdlib>

#ifndef TRIAGE_DATA_DIR
#define TRIAGE_DATA_DIR "data"
#endif
#ifndef TRIAGE_VERSION
#define TRIAGE_VERSION "0.0.0"
#endif

namespace triage {

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("TRIAGE_DATA_DIR"); env && *env) return env;
    return TRIAGE_DATA_DIR;
}

std::string_view pipeline_version() { return "triage-" TRIAGE_VERSION; }

Resources Resources::load(const ResourcePaths& paths) {
    Resources r;
    r.suffixes = SuffixList::load(paths.data_dir / "public_suffixes.txt");
    r.news_keywords = KeywordList::load(paths.data_dir / "news_keywords.txt");
    r.proxy_keywords = KeywordList::load(paths.data_dir / "proxy_keywords.txt");
    for (auto& t : read_list_file(paths.data_dir / "novelty_tlds.txt")) r.novelty_tlds.push_back(to_lower(t));
    if (paths.asn_table) r.asn = AsnTable::load(*paths.asn_table);
    if (paths.geo_table) r.geo = GeoTable::load(*paths.geo_table);
    if (paths.whois_aliases) r.whois_aliases = WhoisAliases::load(*paths.whois_aliases);
    return r;
}

ExtractContext Resources::context() const {
    return ExtractContext{&suffixes, &news_keywords, &proxy_keywords, novelty_tlds, &asn, &geo};
}

}  // namespace triage
