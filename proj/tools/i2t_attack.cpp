// i2t-attack: gray-box adversarial attacks on image-to-text encoders.
//
// Subcommands: filter, attack, sweep, evaluate, report. Configuration comes
// from a JSON document plus dotted --set overrides; artifacts land under
// --output-dir as <mode>/<epsilon>/<sample_id>.{png,trace.jsonl,result.json}.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "i2t/attack.hpp"
#include "i2t/cache.hpp"
#include "i2t/dataset.hpp"
#include "i2t/errors.hpp"
#include "i2t/evaluation.hpp"
#include "i2t/manifest.hpp"
#include "i2t/registry.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersionTag = "i2t-attack/0.1.0";

int exit_code_for(const i2t::Error& e) {
    switch (e.code()) {
        case i2t::ErrorCode::InvalidArgument:
        case i2t::ErrorCode::MissingIndex:
            return 2;
        case i2t::ErrorCode::ModelLoad:
            return 3;
        case i2t::ErrorCode::MissingArtifact:
        case i2t::ErrorCode::EmptyInput:
            return 4;
        default:
            return 1;
    }
}

json default_config() {
    json j;
    j["attack"] = i2t::AttackConfig{};
    j["dataset"] = {{"root", ""}, {"limit", nullptr}, {"seed", 17}};
    j["encoders"] = {{"image", "toy-image:seed=7,dim=32,patch=4,size=32x32"},
                     {"text", "toy-text:seed=7,dim=32"},
                     {"caption", "toy-caption:seed=7,dim=32,patch=4,size=32x32,words=3"},
                     {"clip_image", "toy-image:seed=7,dim=32,patch=4,size=32x32"},
                     {"clip_text", "toy-text:seed=7,dim=32"}};
    j["filter"] = {{"tau", 0.7}};
    j["eval"] = {{"extra_generated_column", false}};
    j["sweep"] = {{"grid", {0.05, 0.1, 0.2, 0.3}}, {"modes", {"untargeted"}}};
    j["pairing_seed"] = nullptr;
    j["output_dir"] = "out";
    j["cache_dir"] = nullptr;
    return j;
}

const std::set<std::string>& allowed_keys() {
    static const std::set<std::string> keys = {
        "attack.epsilon",        "attack.lam",
        "attack.learning_rate",  "attack.beta1",
        "attack.beta2",          "attack.scheduler_factor",
        "attack.scheduler_patience", "attack.max_steps",
        "attack.min_learning_rate",  "attack.mode",
        "attack.seed",           "dataset.root",
        "dataset.limit",         "dataset.seed",
        "encoders.image",        "encoders.text",
        "encoders.caption",      "encoders.clip_image",
        "encoders.clip_text",    "filter.tau",
        "eval.extra_generated_column", "sweep.grid",
        "sweep.modes",           "pairing_seed",
        "output_dir",            "cache_dir",
    };
    return keys;
}

void collect_leaf_keys(const json& j, const std::string& prefix, std::vector<std::string>& out) {
    if (!j.is_object()) {
        out.push_back(prefix);
        return;
    }
    for (const auto& [key, value] : j.items()) {
        collect_leaf_keys(value, prefix.empty() ? key : prefix + "." + key, out);
    }
}

void reject_unknown_keys(const json& j) {
    std::vector<std::string> keys;
    collect_leaf_keys(j, "", keys);
    for (const std::string& key : keys) {
        if (!allowed_keys().count(key)) {
            throw i2t::Error(i2t::ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
        }
    }
}

void set_dotted(json& j, const std::string& key, const json& value) {
    json* node = &j;
    std::istringstream parts(key);
    std::string part;
    std::vector<std::string> path;
    while (std::getline(parts, part, '.')) path.push_back(part);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &((*node)[path[i]]);
    (*node)[path.back()] = value;
}

json parse_override_value(const std::string& raw) {
    const json parsed = json::parse(raw, nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded()) return parsed;
    return json(raw);  // plain string
}

std::string now_timestamp() {
    if (const char* fixed = std::getenv("I2T_RUN_TIMESTAMP")) return fixed;
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string eps_label(double eps) { return json(eps).dump(); }

/// Everything a subcommand needs, resolved from config + flags.
struct App {
    json config = default_config();

    // dedicated flags
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir_flag;
    std::string mode_flag;
    double epsilon_flag = -1.0;
    std::string grid_flag;
    long long limit_flag = -2;  // -2: unset, -1: unlimited
    long long seed_flag = std::numeric_limits<long long>::min();
    int workers = 1;
    bool resume = false;

    void finalize() {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw i2t::Error(i2t::ErrorCode::InvalidArgument,
                                 "cannot read config file " + config_path);
            }
            json user;
            try {
                in >> user;
            } catch (const json::exception& e) {
                throw i2t::Error(i2t::ErrorCode::InvalidArgument,
                                 std::string("bad config JSON: ") + e.what());
            }
            reject_unknown_keys(user);
            config.merge_patch(user);
        }
        for (const std::string& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw i2t::Error(i2t::ErrorCode::InvalidArgument,
                                 "--set expects key=value, got '" + kv + "'");
            }
            const std::string key = kv.substr(0, eq);
            if (!allowed_keys().count(key)) {
                throw i2t::Error(i2t::ErrorCode::InvalidArgument,
                                 "unknown override key '" + key + "'");
            }
            set_dotted(config, key, parse_override_value(kv.substr(eq + 1)));
        }
        if (!output_dir_flag.empty()) config["output_dir"] = output_dir_flag;
        if (!mode_flag.empty()) config["attack"]["mode"] = mode_flag;
        if (epsilon_flag > 0.0) config["attack"]["epsilon"] = epsilon_flag;
        if (seed_flag != std::numeric_limits<long long>::min()) {
            config["attack"]["seed"] = seed_flag;
        }
        if (limit_flag >= -1) {
            config["dataset"]["limit"] = limit_flag < 0 ? json(nullptr) : json(limit_flag);
        }
        if (!grid_flag.empty()) {
            json grid = json::array();
            std::istringstream parts(grid_flag);
            std::string item;
            while (std::getline(parts, item, ',')) {
                try {
                    grid.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw i2t::Error(i2t::ErrorCode::InvalidArgument,
                                     "--grid expects comma-separated numbers");
                }
            }
            config["sweep"]["grid"] = grid;
        }
    }

    i2t::AttackConfig attack_config() const {
        i2t::AttackConfig cfg;
        try {
            cfg = config.at("attack").get<i2t::AttackConfig>();
        } catch (const json::exception& e) {
            throw i2t::Error(i2t::ErrorCode::InvalidArgument,
                             std::string("bad attack config: ") + e.what());
        }
        const auto violations = i2t::validate_config(cfg);
        if (!violations.empty()) {
            std::string msg = "invalid attack config:";
            for (const auto& v : violations) msg += " " + v.code;
            throw i2t::Error(i2t::ErrorCode::InvalidArgument, msg);
        }
        return cfg;
    }

    fs::path output_dir() const { return config.at("output_dir").get<std::string>(); }

    fs::path cache_dir() const {
        if (config.at("cache_dir").is_string()) {
            return config.at("cache_dir").get<std::string>();
        }
        return output_dir() / "cache";
    }

    fs::path filtered_path() const { return output_dir() / "filtered.json"; }

    std::optional<std::size_t> dataset_limit() const {
        const json& limit = config.at("dataset").at("limit");
        if (limit.is_null()) return std::nullopt;
        return limit.get<std::size_t>();
    }

    std::string encoder_id(const char* role) const {
        return config.at("encoders").at(role).get<std::string>();
    }
};

// ---------------------------------------------------------------------------
// filter

int cmd_filter(App& app) {
    const fs::path root = app.config.at("dataset").at("root").get<std::string>();
    if (root.empty() || !fs::exists(root)) {
        throw i2t::Error(i2t::ErrorCode::MissingIndex,
                         "dataset root '" + root.string() + "' does not exist");
    }
    const double tau = app.config.at("filter").at("tau").get<double>();
    const auto captioner = i2t::make_captioner(app.encoder_id("caption"));
    const auto text_encoder = i2t::make_text_encoder(app.encoder_id("text"));

    i2t::DatasetLoadStats load_stats;
    const auto samples =
        i2t::load_dataset(root, app.dataset_limit(),
                          app.config.at("dataset").at("seed").get<std::uint64_t>(), &load_stats);

    fs::create_directories(app.output_dir());
    i2t::CaptionCache cache(app.cache_dir() / "captions");
    i2t::FilterStats stats;
    const i2t::FilteredDataset filtered =
        i2t::filter_hallucinations(samples, *captioner, *text_encoder, tau, &cache, &stats);
    i2t::write_filtered(filtered, app.filtered_path());

    std::cout << "filter: retained " << filtered.samples.size() << "/" << samples.size()
              << " at tau=" << tau << " (captioned " << stats.captioned_fresh << ", cache hits "
              << stats.cache_hits << ", failed " << stats.failed << ", unreadable "
              << load_stats.skipped << ")\n"
              << "filter: manifest " << app.filtered_path().string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// attack

struct AttackJob {
    i2t::CaptionedSample source;
    std::optional<i2t::CaptionedSample> target;  // targeted mode only
};

struct CellPaths {
    fs::path dir;
    fs::path png(const std::string& id) const { return dir / (id + ".png"); }
    fs::path trace(const std::string& id) const { return dir / (id + ".trace.jsonl"); }
    fs::path result(const std::string& id) const { return dir / (id + ".result.json"); }
    bool complete(const std::string& id) const {
        return fs::exists(png(id)) && fs::exists(trace(id)) && fs::exists(result(id));
    }
};

CellPaths cell_paths(const fs::path& output_dir, i2t::AttackMode mode, double epsilon) {
    return {output_dir / i2t::to_string(mode) / eps_label(epsilon)};
}

std::vector<AttackJob> plan_jobs(const App& app, const i2t::FilteredDataset& filtered,
                                 i2t::AttackMode mode) {
    std::vector<AttackJob> jobs;
    if (mode == i2t::AttackMode::Untargeted) {
        for (const auto& s : filtered.samples) jobs.push_back({s, std::nullopt});
    } else {
        const json& pairing_seed = app.config.at("pairing_seed");
        if (!pairing_seed.is_number()) {
            throw i2t::Error(i2t::ErrorCode::InvalidArgument,
                             "targeted mode needs pairing_seed (--set pairing_seed=N); "
                             "targets are unresolvable without it");
        }
        for (auto& [src, dst] :
             i2t::select_target_pairs(filtered, pairing_seed.get<std::uint64_t>())) {
            jobs.push_back({src, dst});
        }
    }
    if (const auto limit = app.dataset_limit(); limit && jobs.size() > *limit) {
        jobs.resize(*limit);
    }
    return jobs;
}

/// Clean image resized to encoder resolution, embedding served via the cache.
i2t::Embedding cached_embedding(const i2t::ImageTensor& model_res_image,
                                const i2t::ImageEncoderAdapter& encoder,
                                i2t::EmbeddingCache& cache) {
    const std::string hash = i2t::image_unit_hash(model_res_image);
    if (auto hit = cache.get(encoder.encoder_id(), hash)) return *hit;
    const i2t::Embedding e = i2t::encode_image(encoder, model_res_image);
    cache.put(encoder.encoder_id(), hash, e);
    return e;
}

int run_attack_cell(App& app, const i2t::FilteredDataset& filtered,
                    const i2t::ImageEncoderAdapter& encoder, i2t::AttackMode mode, double epsilon,
                    bool quiet = false) {
    i2t::AttackConfig cfg = app.attack_config();
    cfg.mode = mode;
    cfg.epsilon = epsilon;

    const std::vector<AttackJob> jobs = plan_jobs(app, filtered, mode);
    if (jobs.empty()) {
        throw i2t::Error(i2t::ErrorCode::InsufficientSamples, "no samples to attack");
    }
    const CellPaths cell = cell_paths(app.output_dir(), mode, epsilon);
    fs::create_directories(cell.dir);
    i2t::EmbeddingCache embedding_cache(app.cache_dir() / "embeddings");

    if (!fs::exists(cell.dir / "run_manifest.json")) {
        i2t::RunManifest manifest;
        manifest.config = cfg;
        for (const auto& job : jobs) {
            manifest.input_paths.push_back(job.source.image_path.string());
        }
        manifest.output_dir = cell.dir.string();
        manifest.encoder_id = encoder.encoder_id();
        manifest.timestamp = now_timestamp();
        manifest.git_or_version_tag = kVersionTag;
        i2t::write_manifest(manifest, cell.dir / "run_manifest.json");
    }

    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    std::atomic<int> skipped{0};
    std::mutex io_mutex;

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const AttackJob& job = jobs[i];
            const std::string& id = job.source.sample_id;
            try {
                if (app.resume && cell.complete(id)) {
                    skipped.fetch_add(1);
                    continue;
                }
                const i2t::ImageTensor clean_unit = i2t::to_unit_domain(job.source.load_image());
                const i2t::ImageTensor clean_model =
                    i2t::prepare_encoder_input(encoder, clean_unit);

                i2t::ObjectiveSpec spec;
                spec.mode = mode;
                spec.lam = cfg.lam;
                spec.clean_image = clean_model;
                if (job.target) {
                    const i2t::ImageTensor target_model = i2t::prepare_encoder_input(
                        encoder, i2t::to_unit_domain(job.target->load_image()));
                    spec.reference_embedding =
                        cached_embedding(target_model, encoder, embedding_cache);
                } else {
                    spec.reference_embedding =
                        cached_embedding(clean_model, encoder, embedding_cache);
                }

                i2t::AttackResult result;
                {
                    i2t::TraceWriter trace(cell.trace(id));
                    result = i2t::run_attack(clean_model, spec, cfg, encoder, trace.callback());
                }
                i2t::save_png(i2t::quantize_feasible(clean_model, result.adversarial_image,
                                                     cfg.epsilon),
                              cell.png(id));

                json rj{{"sample_id", id},
                        {"mode", i2t::to_string(mode)},
                        {"epsilon", cfg.epsilon},
                        {"seed", cfg.seed},
                        {"steps_run", result.steps_run},
                        {"stop_reason", i2t::to_string(result.stop_reason)},
                        {"cs_final", result.cs_final},
                        {"linf_actual", result.linf_actual},
                        {"l2_actual", result.l2_actual},
                        {"final_loss",
                         result.loss_trace.empty() ? json(nullptr) : json(result.loss_trace.back())}};
                if (job.target) rj["target_sample_id"] = job.target->sample_id;
                std::ofstream out(cell.result(id));
                out << rj.dump(2) << "\n";

                if (!quiet) {
                    std::lock_guard lock(io_mutex);
                    std::cout << "attack " << i2t::to_string(mode) << " eps=" << eps_label(epsilon)
                              << " " << id << ": cs_final=" << result.cs_final << " steps="
                              << result.steps_run << " (" << i2t::to_string(result.stop_reason)
                              << ")\n";
                }
            } catch (const std::exception& e) {
                failures.fetch_add(1);
                std::lock_guard lock(io_mutex);
                std::cerr << "attack " << id << " failed: " << e.what() << "\n";
            }
        }
    };

    std::vector<std::thread> pool;
    const int workers = std::max(1, app.workers);
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (!quiet) {
        std::cout << "attack cell " << i2t::to_string(mode) << "/" << eps_label(epsilon) << ": "
                  << jobs.size() - failures.load() - skipped.load() << " done, " << skipped.load()
                  << " skipped, " << failures.load() << " failed\n";
    }
    if (failures.load() == static_cast<int>(jobs.size())) {
        throw i2t::Error(i2t::ErrorCode::PipelineFailure, "every attack in the cell failed");
    }
    return 0;
}

int cmd_attack(App& app) {
    if (!fs::exists(app.filtered_path())) {
        throw i2t::Error(i2t::ErrorCode::MissingArtifact,
                         "filtered manifest not found at " + app.filtered_path().string() +
                             " (run the filter subcommand first)");
    }
    const i2t::FilteredDataset filtered = i2t::read_filtered(app.filtered_path());
    const auto encoder = i2t::make_image_encoder(app.encoder_id("image"));
    const i2t::AttackConfig cfg = app.attack_config();
    return run_attack_cell(app, filtered, *encoder, cfg.mode, cfg.epsilon);
}

// ---------------------------------------------------------------------------
// evaluate

std::vector<i2t::EvalRecord> evaluate_cells(App& app, const i2t::FilteredDataset& filtered,
                                            const std::vector<fs::path>& cells) {
    const auto captioner = i2t::make_captioner(app.encoder_id("caption"));
    const auto clip_image = i2t::make_image_encoder(app.encoder_id("clip_image"));
    const auto clip_text = i2t::make_text_encoder(app.encoder_id("clip_text"));
    const i2t::ClipScorer clip{clip_image.get(), clip_text.get()};
    const bool extra = app.config.at("eval").at("extra_generated_column").get<bool>();

    std::map<std::string, const i2t::CaptionedSample*> by_id;
    for (const auto& s : filtered.samples) by_id[s.sample_id] = &s;

    std::vector<i2t::EvalRecord> records;
    for (const fs::path& cell : cells) {
        std::vector<fs::path> result_files;
        for (const auto& entry : fs::directory_iterator(cell)) {
            const std::string name = entry.path().filename().string();
            if (name.size() > 12 && name.substr(name.size() - 12) == ".result.json") {
                result_files.push_back(entry.path());
            }
        }
        std::sort(result_files.begin(), result_files.end());
        for (const fs::path& rf : result_files) {
            std::ifstream in(rf);
            json rj;
            in >> rj;
            const std::string id = rj.at("sample_id").get<std::string>();
            const auto it = by_id.find(id);
            if (it == by_id.end()) {
                std::cerr << "evaluate: skipping " << id << " (not in the filtered manifest)\n";
                continue;
            }
            const fs::path png = cell / (id + ".png");
            if (!fs::exists(png)) {
                throw i2t::Error(i2t::ErrorCode::MissingArtifact,
                                 "adversarial image missing: " + png.string());
            }
            i2t::EvalInputs inputs;
            inputs.sample_id = id;
            inputs.mode = i2t::attack_mode_from_string(rj.at("mode").get<std::string>());
            inputs.epsilon = rj.at("epsilon").get<double>();
            inputs.clean_image = it->second->load_image();
            inputs.adversarial_image = i2t::load_png(png);
            inputs.reference_caption = filtered.reference_captions.at(id);
            inputs.extra_generated_column = extra;
            records.push_back(i2t::evaluate_pair(inputs, *captioner, clip));
        }
    }
    return records;
}

std::vector<fs::path> discover_cells(const fs::path& output_dir) {
    std::vector<fs::path> cells;
    for (const char* mode : {"untargeted", "targeted"}) {
        const fs::path mode_dir = output_dir / mode;
        if (!fs::exists(mode_dir)) continue;
        for (const auto& entry : fs::directory_iterator(mode_dir)) {
            if (entry.is_directory()) cells.push_back(entry.path());
        }
    }
    std::sort(cells.begin(), cells.end());
    return cells;
}

int cmd_evaluate(App& app) {
    if (!fs::exists(app.filtered_path())) {
        throw i2t::Error(i2t::ErrorCode::MissingArtifact,
                         "filtered manifest not found at " + app.filtered_path().string());
    }
    const i2t::FilteredDataset filtered = i2t::read_filtered(app.filtered_path());
    const std::vector<fs::path> cells = discover_cells(app.output_dir());
    if (cells.empty()) {
        throw i2t::Error(i2t::ErrorCode::MissingArtifact,
                         "no attack artifacts under " + app.output_dir().string());
    }
    const auto records = evaluate_cells(app, filtered, cells);
    if (records.empty()) {
        throw i2t::Error(i2t::ErrorCode::MissingArtifact, "attack cells contained no results");
    }
    const fs::path csv = app.output_dir() / "records.csv";
    i2t::write_records_csv(records, csv);
    std::cout << "evaluate: " << records.size() << " records -> " << csv.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report

int write_report_files(const std::vector<i2t::EvalRecord>& records, const fs::path& output_dir) {
    const i2t::SweepReport report = i2t::aggregate_sweep(records);
    {
        std::ofstream out(output_dir / "report.json");
        out << i2t::report_to_json(report).dump(2) << "\n";
    }
    const std::string table = i2t::render_report_table(report);
    {
        std::ofstream out(output_dir / "report.txt");
        out << table;
    }
    {
        std::ofstream out(output_dir / "report.svg");
        out << i2t::render_report_svg(report);
    }
    std::cout << table;
    std::cout << "report: wrote report.{json,txt,svg} under " << output_dir.string() << "\n";
    return 0;
}

int cmd_report(App& app) {
    const fs::path csv = app.output_dir() / "records.csv";
    if (!fs::exists(csv)) {
        throw i2t::Error(i2t::ErrorCode::MissingArtifact, "records CSV not found: " + csv.string());
    }
    return write_report_files(i2t::read_records_csv(csv), app.output_dir());
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(App& app) {
    if (!fs::exists(app.filtered_path())) {
        throw i2t::Error(i2t::ErrorCode::MissingArtifact,
                         "filtered manifest not found at " + app.filtered_path().string() +
                             " (run the filter subcommand first)");
    }
    const i2t::FilteredDataset filtered = i2t::read_filtered(app.filtered_path());
    const auto encoder = i2t::make_image_encoder(app.encoder_id("image"));

    std::vector<double> grid;
    for (const auto& e : app.config.at("sweep").at("grid")) grid.push_back(e.get<double>());
    std::vector<i2t::AttackMode> modes;
    for (const auto& m : app.config.at("sweep").at("modes")) {
        modes.push_back(i2t::attack_mode_from_string(m.get<std::string>()));
    }
    if (grid.empty() || modes.empty()) {
        throw i2t::Error(i2t::ErrorCode::InvalidArgument, "sweep needs a grid and at least one mode");
    }

    int incomplete = 0;
    for (const i2t::AttackMode mode : modes) {
        for (const double eps : grid) {
            try {
                run_attack_cell(app, filtered, *encoder, mode, eps);
            } catch (const i2t::Error& e) {
                incomplete += 1;
                std::cerr << "sweep: cell " << i2t::to_string(mode) << "/" << eps_label(eps)
                          << " incomplete: " << e.what() << "\n";
            }
        }
    }

    std::vector<fs::path> cells;
    for (const i2t::AttackMode mode : modes) {
        for (const double eps : grid) {
            const fs::path dir = cell_paths(app.output_dir(), mode, eps).dir;
            if (fs::exists(dir)) cells.push_back(dir);
        }
    }
    const auto records = evaluate_cells(app, filtered, cells);
    if (records.empty()) {
        throw i2t::Error(i2t::ErrorCode::PipelineFailure, "sweep produced no evaluable records");
    }
    i2t::write_records_csv(records, app.output_dir() / "records.csv");
    write_report_files(records, app.output_dir());
    if (incomplete > 0) {
        std::cerr << "sweep: " << incomplete << " cell(s) incomplete; report covers the rest\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Gray-box adversarial attacks on image-to-text encoders"};
    cli.require_subcommand(1);

    App app;
    cli.add_option("--config", app.config_path, "JSON config file");
    cli.add_option("--set", app.overrides, "override config values as dotted key=value")
        ->take_all();
    cli.add_option("--output-dir", app.output_dir_flag, "artifact directory");
    cli.add_option("--mode", app.mode_flag, "attack mode: untargeted or targeted");
    cli.add_option("--epsilon", app.epsilon_flag, "L-inf budget in the unit domain");
    cli.add_option("--grid", app.grid_flag, "comma-separated epsilon grid for sweep");
    cli.add_option("--limit", app.limit_flag, "max samples (-1 for all)");
    cli.add_option("--seed", app.seed_flag, "attack seed");
    cli.add_option("--workers", app.workers, "parallel workers for attack runs");
    cli.add_flag("--resume", app.resume, "skip samples whose artifacts already exist");

    auto* filter = cli.add_subcommand("filter", "caption the dataset and drop hallucinated pairs");
    auto* attack = cli.add_subcommand("attack", "run the attack for one mode and epsilon");
    auto* sweep = cli.add_subcommand("sweep", "attack + evaluate over the epsilon grid");
    auto* evaluate = cli.add_subcommand("evaluate", "score existing attack artifacts");
    auto* report = cli.add_subcommand("report", "render tables and plots from records.csv");

    CLI11_PARSE(cli, argc, argv);

    try {
        app.finalize();
        if (filter->parsed()) return cmd_filter(app);
        if (attack->parsed()) return cmd_attack(app);
        if (sweep->parsed()) return cmd_sweep(app);
        if (evaluate->parsed()) return cmd_evaluate(app);
        if (report->parsed()) return cmd_report(app);
    } catch (const i2t::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
