#include "triage/store.hpp"

#include "triage/error.hpp"
#include "triage/rng.hpp"
#include "triage/serialize.hpp"
#include "triage/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

namespace triage {

using nlohmann::json;

// ---- archive -----------------------------------------------------------

json to_json(const ArchiveEntry& e) {
    return {{"domain", e.domain},
            {"probed_at", format_iso8601(e.probed_at)},
            {"record", to_json(e.record)},
            {"features", to_json(e.features)},
            {"prediction", e.prediction ? to_json(*e.prediction) : json(nullptr)},
            {"pipeline_version", e.pipeline_version}};
}

ArchiveEntry archive_entry_from_json(const json& j) {
    try {
        ArchiveEntry e;
        e.domain = j.at("domain").get<std::string>();
        auto ts = parse_iso8601(j.at("probed_at").get<std::string>());
        if (!ts) throw Error(ErrorKind::validation, "bad probed_at");
        e.probed_at = *ts;
        e.record = probe_record_from_json(j.at("record"));
        e.features = feature_vector_from_json(j.at("features"));
        if (!j.at("prediction").is_null()) e.prediction = prediction_from_json(j.at("prediction"));
        e.pipeline_version = j.at("pipeline_version").get<std::string>();
        return e;
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::validation, std::string("malformed archive entry: ") + ex.what());
    }
}

ArchiveWriter::ArchiveWriter(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    file_ = std::fopen(path.c_str(), "ab");
    if (!file_) throw Error(ErrorKind::io, "cannot open archive " + path.string());
}

ArchiveWriter::~ArchiveWriter() {
    if (file_) std::fclose(file_);
}

std::uint64_t ArchiveWriter::append(const ArchiveEntry& entry) {
    const std::string line = to_json(entry).dump() + '\n';
    std::lock_guard lock(mu_);
    if (std::fseek(file_, 0, SEEK_END) != 0) throw Error(ErrorKind::io, "seek failed on " + path_.string());
    const long offset = std::ftell(file_);
    if (offset < 0) throw Error(ErrorKind::io, "tell failed on " + path_.string());
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
        throw Error(ErrorKind::io, "write failed on " + path_.string());
    }
    return static_cast<std::uint64_t>(offset);
}

ArchiveScan archive_scan(const std::filesystem::path& path) {
    ArchiveScan scan;
    std::ifstream in(path, std::ios::binary);
    if (!in) return scan;
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) break;
        const std::string_view line(text.data() + pos, nl - pos);
        if (!trim(line).empty()) {
            try {
                scan.entries.emplace_back(pos, archive_entry_from_json(json::parse(line)));
            } catch (const std::exception&) {
                ++scan.corrupt;
            }
        }
        pos = nl + 1;
    }
    return scan;
}

ArchiveEntry archive_read_at(const std::filesystem::path& path, std::uint64_t offset) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::not_found, "archive " + path.string() + " not found");
    in.seekg(static_cast<std::streamoff>(offset));
    std::string line;
    if (!in || !std::getline(in, line)) throw Error(ErrorKind::not_found, "no archive entry at offset " + std::to_string(offset));
    if (offset > 0) {
        // The offset must be the start of a line.
        in.clear();
        in.seekg(static_cast<std::streamoff>(offset - 1));
        if (in.get() != '\n') throw Error(ErrorKind::not_found, "offset " + std::to_string(offset) + " is not an entry start");
    }
    try {
        return archive_entry_from_json(json::parse(line));
    } catch (const std::exception& e) {
        throw Error(ErrorKind::not_found, "unreadable archive entry at offset " + std::to_string(offset) + ": " + e.what());
    }
}

// ---- CSV ---------------------------------------------------------------

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field.empty()) quoted = true;
            else field += c;
            field_started = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            if (field_started || !field.empty() || !row.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row.clear();
            field_started = false;
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw Error(ErrorKind::validation, "unterminated quoted CSV field");
    if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// ---- dataset -----------------------------------------------------------

std::string_view to_string(LabelSource s) { return s == LabelSource::moderator ? "moderator" : "seed_corpus"; }

std::optional<LabelSource> parse_label_source(std::string_view text) {
    if (text == "seed_corpus") return LabelSource::seed_corpus;
    if (text == "moderator") return LabelSource::moderator;
    return std::nullopt;
}

std::vector<std::string> dataset_header() {
    std::vector<std::string> h{"domain", "label", "label_source", "labeled_at"};
    for (const auto& col : source_columns()) h.emplace_back(col.key);
    return h;
}

namespace {

std::string join_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += csv_field(cells[i]);
    }
    line += '\n';
    return line;
}

std::string dataset_row(const LabeledExample& e) {
    std::vector<std::string> cells{e.domain, std::string(to_string(e.label)), std::string(to_string(e.source)),
                                   format_iso8601(e.labeled_at)};
    for (const auto& col : source_columns()) cells.push_back(to_cell(e.features[col.id]));
    return join_row(cells);
}

}  // namespace

void dataset_save(const std::filesystem::path& path, std::span<const LabeledExample> examples) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << join_row(dataset_header());
    for (const auto& e : examples) out << dataset_row(e);
    if (!out) throw Error(ErrorKind::io, "write failed on " + path.string());
}

void dataset_append(const std::filesystem::path& path, const LabeledExample& example) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorKind::io, "cannot append to " + path.string());
    if (fresh) out << join_row(dataset_header());
    out << dataset_row(example);
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed on " + path.string());
}

std::vector<LabeledExample> dataset_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot read dataset " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto rows = parse_csv(text);
    if (rows.empty() || rows.front() != dataset_header()) {
        throw Error(ErrorKind::validation, path.string() + ": header does not match the dataset schema");
    }
    std::vector<LabeledExample> out;
    std::unordered_map<std::string, std::size_t> position;
    const auto& columns = source_columns();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = path.string() + " row " + std::to_string(r + 1);
        if (row.size() != 4 + columns.size()) throw Error(ErrorKind::validation, where + ": wrong number of cells");
        LabeledExample e;
        e.domain = row[0];
        auto label = parse_label(row[1]);
        auto source = parse_label_source(row[2]);
        auto ts = parse_iso8601(row[3]);
        if (e.domain.empty() || !label || !source || !ts) {
            throw Error(ErrorKind::validation, where + ": bad domain, label, label_source or labeled_at");
        }
        e.label = *label;
        e.source = *source;
        e.labeled_at = *ts;
        try {
            for (std::size_t c = 0; c < columns.size(); ++c) e.features.set(columns[c].id, value_from_cell(columns[c].id, row[4 + c]));
        } catch (const Error& err) {
            throw Error(ErrorKind::validation, where + ": " + err.what());
        }
        if (auto it = position.find(e.domain); it != position.end()) {
            out[it->second] = std::move(e);
        } else {
            position.emplace(e.domain, out.size());
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<LabeledExample> dataset_balance(std::span<const LabeledExample> examples, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, kClassCount> members;
    for (std::size_t i = 0; i < examples.size(); ++i) members[index_of(examples[i].label)].push_back(i);
    std::size_t m = examples.size();
    for (std::size_t c = 0; c < kClassCount; ++c) {
        if (members[c].empty()) {
            throw Error(ErrorKind::empty_class, "class '" + std::string(to_string(kClassOrder[c])) + "' has no examples");
        }
        m = std::min(m, members[c].size());
    }
    Rng rng(seed);
    std::vector<std::size_t> keep;
    for (auto& idx : members) {
        rng.shuffle(std::span(idx));
        keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
    }
    std::sort(keep.begin(), keep.end());
    std::vector<LabeledExample> out;
    out.reserve(keep.size());
    for (auto i : keep) out.push_back(examples[i]);
    return out;
}

// ---- model -------------------------------------------------------------

namespace {

[[noreturn]] void incompatible(const std::string& what) { throw Error(ErrorKind::incompatible_model, what); }

json node_to_json(const Tree& tree, std::size_t id) {
    const auto& n = tree.nodes[id];
    json j = {{"counts", n.counts}};
    if (!n.is_leaf()) {
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["left"] = node_to_json(tree, static_cast<std::size_t>(n.left));
        j["right"] = node_to_json(tree, static_cast<std::size_t>(n.right));
    }
    return j;
}

std::int32_t node_from_json(const json& j, Tree& tree, std::size_t width, std::size_t depth) {
    if (depth > 10'000) incompatible("tree too deep");
    const auto id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode node;
    node.counts = j.at("counts").get<ClassCounts>();
    if (j.contains("feature")) {
        node.feature = j.at("feature").get<std::int32_t>();
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= width) incompatible("split feature out of range");
        node.threshold = j.at("threshold").get<double>();
        node.left = node_from_json(j.at("left"), tree, width, depth + 1);
        node.right = node_from_json(j.at("right"), tree, width, depth + 1);
    }
    tree.nodes[static_cast<std::size_t>(id)] = node;
    return id;
}

}  // namespace

json model_to_json(const Model& model) {
    json vocab = json::object();
    for (const auto& col : source_columns()) {
        if (col.type == FeatureType::categorical || col.type == FeatureType::category_set) {
            vocab[std::string(col.key)] = model.encoder.vocabulary(col.id);
        }
    }
    json mask = json::array();
    const auto m = model.mask();
    for (const auto& col : source_columns()) {
        if (m[index_of(col.id)]) mask.push_back(std::string(col.key));
    }
    json trees = json::array();
    for (const auto& t : model.forest.trees) trees.push_back(node_to_json(t, 0));
    return {{"format_version", kModelFormatVersion},
            {"class_order", {"disinformation", "news", "other"}},
            {"feature_set", std::string(to_string(model.feature_set))},
            {"feature_mask", mask},
            {"encoder", {{"k", model.encoder.k()}, {"vocabularies", vocab}}},
            {"params", to_json(model.forest.params)},
            {"seed", model.forest.seed},
            {"width", model.forest.width},
            {"allowed_columns", model.forest.allowed_columns},
            {"trees", trees}};
}

Model model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("format_version")) incompatible("not a model document");
    if (!j.at("format_version").is_number_integer() || j.at("format_version").get<int>() != kModelFormatVersion) {
        incompatible("model format_version " + j.at("format_version").dump() + " is not the supported version " +
                     std::to_string(kModelFormatVersion));
    }
    try {
        if (j.at("class_order") != json{"disinformation", "news", "other"}) incompatible("unexpected class_order");
        Model model;
        auto set = parse_feature_set(j.at("feature_set").get<std::string>());
        if (!set) incompatible("unknown feature_set");
        model.feature_set = *set;

        std::array<std::vector<std::string>, kSourceCount> vocab;
        const auto& jv = j.at("encoder").at("vocabularies");
        for (const auto& col : source_columns()) {
            if (col.type == FeatureType::categorical || col.type == FeatureType::category_set) {
                vocab[index_of(col.id)] = jv.at(std::string(col.key)).get<std::vector<std::string>>();
            }
        }
        model.encoder = Encoder::from_vocabularies(std::move(vocab), j.at("encoder").at("k").get<std::size_t>());

        json mask = json::array();
        const auto m = model.mask();
        for (const auto& col : source_columns()) {
            if (m[index_of(col.id)]) mask.push_back(std::string(col.key));
        }
        if (j.at("feature_mask") != mask) incompatible("feature_mask does not match feature_set");

        auto& f = model.forest;
        f.params = hyper_params_from_json(j.at("params"));
        f.seed = j.at("seed").get<std::uint64_t>();
        f.width = j.at("width").get<std::size_t>();
        if (f.width != model.encoder.width()) incompatible("model width does not match its encoder");
        f.allowed_columns = j.at("allowed_columns").get<std::vector<std::size_t>>();
        if (f.allowed_columns != model.encoder.columns_for(m)) incompatible("allowed_columns do not match feature_set");
        for (const auto& jt : j.at("trees")) {
            Tree t;
            node_from_json(jt, t, f.width, 0);
            f.trees.push_back(std::move(t));
        }
        if (f.trees.empty()) incompatible("model has no trees");
        return model;
    } catch (const json::exception& e) {
        incompatible(std::string("malformed model: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::incompatible_model) throw;
        incompatible(std::string("malformed model: ") + e.what());
    }
}

std::string model_serialize(const Model& model) { return model_to_json(model).dump() + '\n'; }

Model model_deserialize(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) incompatible("model file is truncated or not valid JSON");
    return model_from_json(j);
}

void model_save(const Model& model, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write " + tmp);
        out << model_serialize(model);
        if (!out) throw Error(ErrorKind::io, "write failed on " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Model model_load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot read model " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_deserialize(text);
}

std::string content_version(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::io, "SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < 6; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

}  // namespace triage
