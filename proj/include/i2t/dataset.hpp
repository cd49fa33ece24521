#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "i2t/cache.hpp"
#include "i2t/encoders.hpp"
#include "i2t/image.hpp"

namespace i2t {

/// One image with its ground-truth captions. The image itself is loaded on
/// demand from image_path.
struct CaptionedSample {
    std::string sample_id;
    std::filesystem::path image_path;
    std::vector<std::string> ground_truth_captions;

    ImageTensor load_image() const;  // byte domain

    bool operator==(const CaptionedSample&) const = default;
};

struct DatasetLoadStats {
    int listed = 0;    // entries in the index
    int skipped = 0;   // undecodable images
};

/// Reads the caption index (root/captions.txt, tab-separated
/// "filename<TAB>caption" or "filename#k<TAB>caption") and returns a seeded
/// sample of up to `limit` decodable pairs. Unreadable images are skipped and
/// counted.
std::vector<CaptionedSample> load_dataset(const std::filesystem::path& root,
                                          std::optional<std::size_t> limit, std::uint64_t seed,
                                          DatasetLoadStats* stats = nullptr);

/// Per-sample outcome of the hallucination filter.
struct FilterEntry {
    CaptionedSample sample;
    std::string predicted_caption;
    double score = 0.0;              // max text-text CS over the ground-truth captions
    std::string reference_caption;   // the ground-truth caption achieving the max
};

/// Samples whose predicted caption stays semantically close to the ground
/// truth (score >= tau), plus what is needed to re-check the predicate.
struct FilteredDataset {
    std::vector<CaptionedSample> samples;  // retained, in input order
    double tau = 0.7;
    std::map<std::string, std::string> predicted_captions;  // sample_id -> caption
    std::map<std::string, double> scores;                   // sample_id -> score
    std::map<std::string, std::string> reference_captions;  // sample_id -> best gt caption
    std::string pipeline_id;
    std::string text_encoder_id;
};

struct FilterStats {
    int captioned_fresh = 0;
    int cache_hits = 0;
    int failed = 0;  // samples dropped by pipeline failures
};

/// Captions every sample, scores the prediction against all ground-truth
/// captions with the text encoder (max over captions), and retains samples
/// with score >= tau. tau must lie in (0, 1].
FilteredDataset filter_hallucinations(const std::vector<CaptionedSample>& samples,
                                      const CaptionPipelineAdapter& captioner,
                                      const TextEncoderAdapter& text_encoder, double tau,
                                      CaptionCache* cache = nullptr, FilterStats* stats = nullptr);

/// Seeded disjoint pairing of filter-retained samples (source != target by
/// construction). Requires at least two samples; an odd leftover is dropped.
std::vector<std::pair<CaptionedSample, CaptionedSample>> select_target_pairs(
    const FilteredDataset& dataset, std::uint64_t seed);

/// Manifest I/O (structured text, reusable by evaluation and attack sweeps).
std::string serialize_filtered(const FilteredDataset& d);
FilteredDataset parse_filtered(const std::string& text);
void write_filtered(const FilteredDataset& d, const std::filesystem::path& path);
FilteredDataset read_filtered(const std::filesystem::path& path);

}  // namespace i2t
