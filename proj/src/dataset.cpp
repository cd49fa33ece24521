#include "i2t/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "i2t/errors.hpp"
#include "i2t/objectives.hpp"
#include "i2t/rng.hpp"

namespace i2t {

ImageTensor CaptionedSample::load_image() const { return load_png(image_path); }

namespace {

// "1000092795.jpg#0" -> "1000092795.jpg" (classic token-file form)
std::string strip_caption_index(const std::string& name) {
    const auto pos = name.rfind('#');
    if (pos == std::string::npos) return name;
    const std::string tail = name.substr(pos + 1);
    if (!tail.empty() && std::all_of(tail.begin(), tail.end(), [](char c) {
            return c >= '0' && c <= '9';
        })) {
        return name.substr(0, pos);
    }
    return name;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<CaptionedSample> load_dataset(const std::filesystem::path& root,
                                          std::optional<std::size_t> limit, std::uint64_t seed,
                                          DatasetLoadStats* stats) {
    const std::filesystem::path index = root / "captions.txt";
    if (!std::filesystem::exists(index)) {
        throw Error(ErrorCode::MissingIndex, "no captions.txt under " + root.string());
    }
    std::ifstream in(index);
    if (!in) throw Error(ErrorCode::MissingIndex, "cannot read " + index.string());

    std::vector<std::string> order;
    std::map<std::string, std::vector<std::string>> captions;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;  // tolerate malformed rows
        const std::string file = strip_caption_index(trim(line.substr(0, tab)));
        const std::string cap = trim(line.substr(tab + 1));
        if (file.empty() || cap.empty()) continue;
        auto [it, inserted] = captions.try_emplace(file);
        if (inserted) order.push_back(file);
        it->second.push_back(cap);
    }
    if (order.empty()) {
        throw Error(ErrorCode::MissingIndex, "caption index " + index.string() + " has no entries");
    }

    DatasetLoadStats local;
    local.listed = static_cast<int>(order.size());

    SeededRng rng(seed);
    rng.shuffle(order);

    std::vector<CaptionedSample> out;
    const std::size_t want = limit.value_or(order.size());
    for (const std::string& file : order) {
        if (out.size() >= want) break;
        CaptionedSample s;
        s.sample_id = std::filesystem::path(file).stem().string();
        s.image_path = std::filesystem::exists(root / "images" / file) ? root / "images" / file
                                                                       : root / file;
        s.ground_truth_captions = captions[file];
        try {
            (void)s.load_image();  // must be decodable as RGB
        } catch (const Error&) {
            local.skipped += 1;
            std::cerr << "warning: skipping unreadable image " << s.image_path.string() << "\n";
            continue;
        }
        out.push_back(std::move(s));
    }
    if (stats) *stats = local;
    return out;
}

FilteredDataset filter_hallucinations(const std::vector<CaptionedSample>& samples,
                                      const CaptionPipelineAdapter& captioner,
                                      const TextEncoderAdapter& text_encoder, double tau,
                                      CaptionCache* cache, FilterStats* stats) {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "tau must lie in (0, 1]");
    }
    FilteredDataset out;
    out.tau = tau;
    out.pipeline_id = captioner.pipeline_id();
    out.text_encoder_id = text_encoder.encoder_id();

    FilterStats local;
    for (const CaptionedSample& sample : samples) {
        try {
            const ImageTensor image = to_unit_domain(sample.load_image());
            const std::string image_hash = image_content_hash(image);

            std::string predicted;
            if (auto hit = cache ? cache->get(out.pipeline_id, image_hash) : std::nullopt) {
                predicted = *hit;
                local.cache_hits += 1;
            } else {
                predicted = caption(captioner, image);
                local.captioned_fresh += 1;
                if (cache) cache->put(out.pipeline_id, image_hash, predicted);
            }

            const Embedding predicted_embedding = encode_text(text_encoder, predicted);
            double best = -2.0;
            std::string best_caption;
            for (const std::string& gt : sample.ground_truth_captions) {
                const double cs =
                    cosine_similarity(predicted_embedding, encode_text(text_encoder, gt));
                if (cs > best) {
                    best = cs;
                    best_caption = gt;
                }
            }

            out.predicted_captions[sample.sample_id] = predicted;
            out.scores[sample.sample_id] = best;
            out.reference_captions[sample.sample_id] = best_caption;
            if (best >= tau) out.samples.push_back(sample);
        } catch (const Error& e) {
            local.failed += 1;
            std::cerr << "warning: dropping sample " << sample.sample_id << ": " << e.what()
                      << "\n";
        }
    }
    // Canonical order, so a manifest round trip preserves the dataset exactly.
    std::sort(out.samples.begin(), out.samples.end(),
              [](const CaptionedSample& a, const CaptionedSample& b) {
                  return a.sample_id < b.sample_id;
              });
    if (stats) *stats = local;
    return out;
}

std::vector<std::pair<CaptionedSample, CaptionedSample>> select_target_pairs(
    const FilteredDataset& dataset, std::uint64_t seed) {
    if (dataset.samples.size() < 2) {
        throw Error(ErrorCode::InsufficientSamples, "target pairing needs at least two samples");
    }
    std::vector<CaptionedSample> shuffled = dataset.samples;
    SeededRng rng(seed);
    rng.shuffle(shuffled);
    std::vector<std::pair<CaptionedSample, CaptionedSample>> out;
    for (std::size_t i = 0; i + 1 < shuffled.size(); i += 2) {
        out.emplace_back(shuffled[i], shuffled[i + 1]);  // odd leftover is dropped
    }
    return out;
}

namespace {

nlohmann::json filtered_to_json(const FilteredDataset& d) {
    nlohmann::json entries = nlohmann::json::array();
    // Scored entries cover retained and rejected samples alike; the retained
    // flag makes the predicate re-checkable from the manifest.
    std::map<std::string, const CaptionedSample*> retained;
    for (const auto& s : d.samples) retained[s.sample_id] = &s;
    for (const auto& [sample_id, score] : d.scores) {
        nlohmann::json e{{"sample_id", sample_id},
                         {"predicted_caption", d.predicted_captions.at(sample_id)},
                         {"score", score},
                         {"reference_caption", d.reference_captions.at(sample_id)},
                         {"retained", retained.count(sample_id) > 0}};
        if (auto it = retained.find(sample_id); it != retained.end()) {
            e["image_path"] = it->second->image_path.string();
            e["captions"] = it->second->ground_truth_captions;
        }
        entries.push_back(std::move(e));
    }
    return nlohmann::json{{"tau", d.tau},
                          {"pipeline_id", d.pipeline_id},
                          {"text_encoder_id", d.text_encoder_id},
                          {"entries", std::move(entries)}};
}

}  // namespace

std::string serialize_filtered(const FilteredDataset& d) {
    return filtered_to_json(d).dump(2) + "\n";
}

FilteredDataset parse_filtered(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad filtered manifest: ") + e.what());
    }
    FilteredDataset d;
    j.at("tau").get_to(d.tau);
    j.at("pipeline_id").get_to(d.pipeline_id);
    j.at("text_encoder_id").get_to(d.text_encoder_id);
    for (const auto& e : j.at("entries")) {
        const std::string id = e.at("sample_id").get<std::string>();
        d.predicted_captions[id] = e.at("predicted_caption").get<std::string>();
        d.scores[id] = e.at("score").get<double>();
        d.reference_captions[id] = e.at("reference_caption").get<std::string>();
        if (e.at("retained").get<bool>()) {
            CaptionedSample s;
            s.sample_id = id;
            s.image_path = e.at("image_path").get<std::string>();
            e.at("captions").get_to(s.ground_truth_captions);
            d.samples.push_back(std::move(s));
        }
    }
    return d;
}

void write_filtered(const FilteredDataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << serialize_filtered(d);
}

FilteredDataset read_filtered(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingArtifact, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_filtered(buf.str());
}

}  // namespace i2t
