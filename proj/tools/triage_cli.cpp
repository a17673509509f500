#include "triage/error.hpp"
#include "triage/eval.hpp"
#include "triage/model.hpp"
#include "triage/probe.hpp"
#include "triage/resources.hpp"
#include "triage/search.hpp"
#include "triage/serialize.hpp"
#include "triage/service.hpp"
#include "triage/store.hpp"
#include "triage/synth.hpp"
#include "triage/text.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <map>

using namespace triage;
using nlohmann::json;

namespace {

enum Exit : int { ok = 0, usage = 2, input = 3, runtime = 4 };

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::conflict:
    case ErrorKind::empty_node: return runtime;
    default: return input;
    }
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- shared helpers ----------------------------------------------------

FeatureSet feature_set_arg(const std::string& text) {
    auto fs = parse_feature_set(text);
    if (!fs) throw UsageError("--feature-set must be domain, domain_cert or all");
    return *fs;
}

Timestamp time_arg(const std::string& text) {
    if (text.empty()) return now_utc();
    auto ts = parse_iso8601(text);
    if (!ts) throw UsageError("--now must be an ISO 8601 timestamp");
    return *ts;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
}

HyperParams params_arg(const std::string& path) {
    if (path.empty()) return {};
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::validation, path + " is not valid JSON");
    return hyper_params_from_json(j.contains("params") ? j.at("params") : j);
}

struct TrainingData {
    std::vector<FeatureVector> vectors;
    std::vector<Label> labels;
    Encoder encoder;
    Matrix x;
    std::vector<std::size_t> allowed;
};

TrainingData load_training(const std::string& dataset, bool balance, std::uint64_t seed, FeatureSet fs,
                           std::size_t vocabulary) {
    auto examples = dataset_load(dataset);
    if (balance) examples = dataset_balance(examples, seed);
    TrainingData d;
    for (auto& e : examples) {
        d.vectors.push_back(std::move(e.features));
        d.labels.push_back(e.label);
    }
    d.encoder = Encoder::fit(d.vectors, vocabulary);
    d.x = encode(d.encoder, d.vectors);
    d.allowed = d.encoder.columns_for(category_mask(fs));
    return d;
}

Config config_arg(const std::string& path) {
    if (path.empty()) return Config{};
    return Config::load(path);
}

// ---- subcommands -------------------------------------------------------

struct Common {
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::string feature_set = "all";
    std::size_t vocabulary = kDefaultVocabulary;
    bool no_balance = false;
};

void add_seed(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
}

void add_training(CLI::App* cmd, Common& c) {
    add_seed(cmd, c);
    cmd->add_option("--workers", c.workers, "Training threads (0 = hardware concurrency)")->capture_default_str();
    cmd->add_option("--feature-set", c.feature_set, "Feature categories: domain, domain_cert or all")
        ->capture_default_str();
    cmd->add_option("--vocabulary", c.vocabulary, "Top-K vocabulary per categorical feature")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-balance", c.no_balance, "Keep the dataset's class sizes instead of downsampling");
}

int run_probe(const std::string& domain, const std::string& config_path, const std::string& fixtures,
              const std::string& now_text, std::int64_t timeout_ms, const std::string& out) {
    const auto now = time_arg(now_text);
    auto config = config_arg(config_path);
    if (!fixtures.empty()) config.fixtures = fixtures;
    if (timeout_ms > 0) config.limits.timeout = std::chrono::milliseconds(timeout_ms);
    const auto resources = Resources::load(config.resources);
    auto host = normalize_hostname(domain);
    if (!host) throw Error(ErrorKind::validation, "'" + domain + "' is not a valid domain name");
    const auto registrable = registrable_domain(*host, resources.suffixes);
    std::unique_ptr<Transport> transport = config.fixtures ? std::make_unique<FixtureTransport>(*config.fixtures)
                                                           : make_live_transport(config.live);
    const auto record = probe_domain(registrable, *transport, config.limits, now);
    const auto text = to_json(record).dump(2) + '\n';
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text(out, text);
    }
    return ok;
}

int run_extract(const std::string& archive, const std::string& config_path, const std::string& labels_path,
                const std::string& out) {
    const auto config = config_arg(config_path);
    const auto resources = Resources::load(config.resources);
    const auto scan = archive_scan(archive);

    // Latest entry per domain, in first-seen order.
    std::vector<std::string> order;
    std::map<std::string, ArchiveEntry> latest;
    for (const auto& [_, entry] : scan.entries) {
        if (!latest.contains(entry.domain)) order.push_back(entry.domain);
        latest[entry.domain] = entry;
    }

    std::map<std::string, Label> labels;
    if (!labels_path.empty()) {
        const auto rows = parse_csv(read_file(labels_path));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() < 2) throw Error(ErrorKind::validation, labels_path + ": row " + std::to_string(i + 1));
            if (i == 0 && rows[i][0] == "domain") continue;
            auto label = parse_label(trim(rows[i][1]));
            if (!label) throw Error(ErrorKind::validation, labels_path + ": bad label '" + rows[i][1] + "'");
            labels[to_lower(trim(rows[i][0]))] = *label;
        }
    }

    std::vector<LabeledExample> examples;
    std::size_t unlabeled = 0;
    for (const auto& domain : order) {
        const auto& entry = latest.at(domain);
        CmsInfo cms;
        if (entry.record.http.available && entry.record.http.body) {
            cms = fingerprint_cms(*entry.record.http.body, entry.record.http.headers);
        }
        auto features = extract(entry.record, cms, resources.context(), entry.probed_at);
        Label label = Label::other;
        if (!labels_path.empty()) {
            auto it = labels.find(domain);
            if (it == labels.end()) {
                ++unlabeled;
                continue;
            }
            label = it->second;
        }
        examples.push_back({domain, std::move(features), label, LabelSource::seed_corpus, entry.probed_at});
    }
    dataset_save(out, examples);
    std::cout << "extracted " << examples.size() << " rows from " << scan.entries.size() << " archive entries";
    if (scan.corrupt) std::cout << " (" << scan.corrupt << " corrupt lines skipped)";
    if (unlabeled) std::cout << ", " << unlabeled << " domains without a label skipped";
    std::cout << " -> " << out << '\n';
    return ok;
}

int run_train(const std::string& dataset, const Common& c, const std::string& params_path, const std::string& out) {
    const auto fs = feature_set_arg(c.feature_set);
    const auto params = params_arg(params_path);
    params.validate();
    auto examples = dataset_load(dataset);
    if (!c.no_balance) examples = dataset_balance(examples, c.seed);
    std::vector<FeatureVector> vectors;
    std::vector<Label> labels;
    for (auto& e : examples) {
        vectors.push_back(std::move(e.features));
        labels.push_back(e.label);
    }
    const auto model = train_model(vectors, labels, params, c.seed, TrainOptions{fs, c.vocabulary, c.workers});
    model_save(model, out);
    std::cout << "trained " << params.describe() << " on " << vectors.size() << " examples (feature set "
              << to_string(fs) << ") -> " << out << " version " << content_version(model_serialize(model)) << '\n';
    return ok;
}

int run_tune(const std::string& dataset, const Common& c, std::size_t iters, std::size_t k, const std::string& out) {
    const auto fs = feature_set_arg(c.feature_set);
    const auto d = load_training(dataset, !c.no_balance, c.seed, fs, c.vocabulary);
    const auto result =
        random_search(d.x, d.labels, SearchSpace::defaults(), iters, k, c.seed, SearchOptions{d.allowed, c.workers});
    json j = {{"params", to_json(result.params)},
              {"mean_accuracy", result.mean_accuracy},
              {"iterations", iters},
              {"folds", k},
              {"seed", c.seed},
              {"feature_set", std::string(to_string(fs))}};
    write_text(out, j.dump(2) + '\n');
    std::cout << "best " << result.params.describe() << " mean accuracy " << result.mean_accuracy << " over "
              << result.fits << " fits -> " << out << '\n';
    return ok;
}

int run_evaluate(const std::string& dataset, const Common& c, std::size_t k, const std::string& params_path,
                 const std::string& out) {
    const auto fs = feature_set_arg(c.feature_set);
    const auto params = params_arg(params_path);
    params.validate();
    const auto d = load_training(dataset, !c.no_balance, c.seed, fs, c.vocabulary);
    const auto report = evaluate_cv(d.x, d.labels, params, k, c.seed, CvOptions{d.allowed, c.workers});
    write_report(report, out);
    std::cout << "accuracy " << report.accuracy << '\n';
    for (std::size_t i = 0; i < kClassCount; ++i) {
        const auto& cr = report.per_class[i];
        std::cout << to_string(kClassOrder[i]) << ": roc_auc " << cr.roc_auc.mean << " +/- " << cr.roc_auc.std
                  << ", pr_auc " << cr.pr_auc.mean << " +/- " << cr.pr_auc.std << '\n';
    }
    std::cout << "report -> " << out << '\n';
    return ok;
}

int run_classify(const std::string& target, const std::string& domain_flag, const std::string& file_flag,
                 const std::string& config_path, const std::string& model_path, const std::string& fixtures,
                 const std::string& now_text) {
    std::vector<std::string> domains;
    const int given = !target.empty() + !domain_flag.empty() + !file_flag.empty();
    if (given != 1) throw UsageError("give exactly one of <domain|file>, --domain or --file");
    std::string file = file_flag;
    if (!target.empty()) {
        if (std::filesystem::is_regular_file(target)) {
            file = target;
        } else {
            domains.push_back(target);
        }
    }
    if (!domain_flag.empty()) domains.push_back(domain_flag);
    if (!file.empty()) {
        for (auto& line : read_list_file(file)) domains.push_back(line);
    }
    const auto now = time_arg(now_text);

    auto config = config_arg(config_path);
    if (!model_path.empty()) config.model = model_path;
    if (!fixtures.empty()) config.fixtures = fixtures;
    const auto resources = Resources::load(config.resources);
    if (!std::filesystem::exists(config.model)) {
        throw Error(ErrorKind::startup, "model file " + config.model.string() + " not found");
    }
    const auto model = model_load(config.model);
    const auto version = content_version(read_file(config.model));
    std::unique_ptr<Transport> transport = config.fixtures ? std::make_unique<FixtureTransport>(*config.fixtures)
                                                           : make_live_transport(config.live);

    for (const auto& raw : domains) {
        auto host = normalize_hostname(trim(raw));
        if (!host) throw Error(ErrorKind::validation, "'" + raw + "' is not a valid domain name");
        const auto registrable = registrable_domain(*host, resources.suffixes);
        const auto record = probe_domain(registrable, *transport, config.limits, now);
        CmsInfo cms;
        if (record.http.available && record.http.body) cms = fingerprint_cms(*record.http.body, record.http.headers);
        const auto features = extract(record, cms, resources.context(), now);
        std::cout << to_json(predict_domain(model, version, registrable, features)).dump() << '\n';
    }
    return ok;
}

int run_replay(const std::string& config_path, const std::vector<std::string>& feeds) {
    auto config = Config::load(config_path);
    for (const auto& spec : feeds) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw UsageError("feed must be kind=path, got '" + spec + "'");
        const auto kind = parse_feed_kind(spec.substr(0, eq));
        if (!kind) throw UsageError("unknown feed kind '" + spec.substr(0, eq) + "'");
        const std::filesystem::path path = spec.substr(eq + 1);
        switch (*kind) {
        case FeedKind::registration: config.feeds.registration = path; break;
        case FeedKind::certificate: config.feeds.certificate = path; break;
        case FeedKind::social: config.feeds.social = path; break;
        }
    }
    Pipeline pipeline(config);
    const auto summary = pipeline.run_replay();
    std::cout << to_json(summary).dump(2) << '\n';
    return ok;
}

int run_serve(const std::string& config_path) {
    Pipeline pipeline(Config::load(config_path));
    std::cout << "serving on " << pipeline.config().bind_host << ':' << pipeline.config().bind_port << " model "
              << pipeline.model_version() << std::endl;
    serve(pipeline);
    return ok;
}

int run_synth(const std::string& out, std::size_t per_class, std::uint64_t seed, double atypical,
              const std::string& config_path) {
    const auto config = config_arg(config_path);
    const auto resources = Resources::load(config.resources);
    SynthOptions options;
    options.per_class = per_class;
    options.seed = seed;
    options.atypical = atypical;
    const auto examples = synth_dataset(options, resources.context());
    dataset_save(out, examples);
    std::cout << "wrote " << examples.size() << " synthetic examples -> " << out << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Infrastructure-based triage of disinformation websites.", "triage"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pipeline_version()));

    std::string config_path;
    std::string out;
    std::string now_text;
    std::string fixtures;
    Common common;

    auto* probe = app.add_subcommand("probe", "Probe one domain and print the ProbeRecord as JSON");
    std::string probe_domain_arg;
    std::int64_t timeout_ms = 0;
    probe->add_option("domain", probe_domain_arg, "Domain or hostname to probe")->required();
    probe->add_option("--config", config_path, "Config file (tables, transport, limits)");
    probe->add_option("--fixtures", fixtures, "Fixture directory to probe instead of the network");
    probe->add_option("--timeout-ms", timeout_ms, "Per-protocol timeout override in milliseconds");
    probe->add_option("--now", now_text, "Probe timestamp (ISO 8601, default current time)");
    probe->add_option("--out", out, "Write JSON here instead of stdout");

    auto* extract_cmd = app.add_subcommand("extract", "Extract feature rows from an archive into a dataset CSV");
    std::string archive_path, labels_path;
    std::string extract_out = "dataset.csv";
    extract_cmd->add_option("archive", archive_path, "Archive JSONL file")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("--config", config_path, "Config file (tables)");
    extract_cmd->add_option("--labels", labels_path,
                            "CSV of domain,label; only labeled domains are written (default: all, label other)");
    extract_cmd->add_option("--out", extract_out, "Dataset CSV to write")->capture_default_str();

    auto* train = app.add_subcommand("train", "Train a model on a dataset CSV");
    std::string dataset, params_path;
    std::string model_out = "model.json";
    train->add_option("dataset,--dataset", dataset, "Dataset CSV")->required()->check(CLI::ExistingFile);
    add_training(train, common);
    train->add_option("--params", params_path, "Hyperparameter JSON (as written by tune)");
    train->add_option("--out", model_out, "Model file to write")->capture_default_str();

    auto* tune = app.add_subcommand("tune", "Random hyperparameter search with stratified k-fold CV");
    std::size_t iters = 250, k = 5;
    std::string tune_out = "params.json";
    tune->add_option("dataset,--dataset", dataset, "Dataset CSV")->required()->check(CLI::ExistingFile);
    add_training(tune, common);
    tune->add_option("--iters", iters, "Sampled settings")->capture_default_str()->check(CLI::PositiveNumber);
    tune->add_option("--k", k, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
    tune->add_option("--out", tune_out, "Chosen parameters JSON")->capture_default_str();

    auto* evaluate = app.add_subcommand("evaluate", "Cross-validated per-class ROC/PR evaluation");
    std::string report_out = "report";
    evaluate->add_option("dataset,--dataset", dataset, "Dataset CSV")->required()->check(CLI::ExistingFile);
    add_training(evaluate, common);
    evaluate->add_option("--k", k, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
    evaluate->add_option("--params", params_path, "Hyperparameter JSON (as written by tune)");
    evaluate->add_option("--out", report_out, "Report directory")->capture_default_str();

    auto* classify_cmd = app.add_subcommand("classify", "Probe and classify domains, one JSON prediction per line");
    std::string target, domain_flag, file_flag, model_path;
    classify_cmd->add_option("target", target, "Domain, or a file with one domain per line");
    classify_cmd->add_option("--domain", domain_flag, "Domain to classify");
    classify_cmd->add_option("--file", file_flag, "File with one domain per line")->check(CLI::ExistingFile);
    classify_cmd->add_option("--config", config_path, "Config file (model, tables, transport)");
    classify_cmd->add_option("--model", model_path, "Model file (overrides config)");
    classify_cmd->add_option("--fixtures", fixtures, "Fixture directory to probe instead of the network");
    classify_cmd->add_option("--now", now_text, "Probe timestamp (ISO 8601, default current time)");

    auto* replay = app.add_subcommand("replay", "Run the pipeline over feed files and print the summary");
    std::vector<std::string> feeds;
    replay->add_option("feeds", feeds, "Feed overrides as kind=path (registration, certificate, social)");
    replay->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    serve_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

    auto* synth = app.add_subcommand("synth", "Write the synthetic labeled dataset");
    std::size_t per_class = 550;
    double atypical = SynthOptions{}.atypical;
    std::string synth_out = "synth.csv";
    add_seed(synth, common);
    synth->add_option("--per-class", per_class, "Examples per class")->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--atypical", atypical, "Per-group probability of another class's profile")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--config", config_path, "Config file (tables)");
    synth->add_option("--out", synth_out, "Dataset CSV to write")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    }

    try {
        if (*probe) return run_probe(probe_domain_arg, config_path, fixtures, now_text, timeout_ms, out);
        if (*extract_cmd) return run_extract(archive_path, config_path, labels_path, extract_out);
        if (*train) return run_train(dataset, common, params_path, model_out);
        if (*tune) return run_tune(dataset, common, iters, k, tune_out);
        if (*evaluate) return run_evaluate(dataset, common, k, params_path, report_out);
        if (*classify_cmd) {
            return run_classify(target, domain_flag, file_flag, config_path, model_path, fixtures, now_text);
        }
        if (*replay) return run_replay(config_path, feeds);
        if (*serve_cmd) return run_serve(config_path);
        if (*synth) return run_synth(synth_out, per_class, common.seed, atypical, config_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return runtime;
    }
    return usage;
}
