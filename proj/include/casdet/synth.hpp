#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "casdet/cascade.hpp"
#include "casdet/chunk_store.hpp"
#include "casdet/nd_array.hpp"
#include "casdet/pyramid.hpp"

namespace casdet {

/// Parameters of a synthetic sparse-blob scene. Per L0 chunk, independently
/// with probability object_prevalence, one ball with a uniformly random
/// centroid inside the chunk is rendered at foreground_intensity over a
/// background_intensity canvas; Gaussian pixel noise is added on top.
struct synth_scene_config {
    pyramid_spec spec;
    std::int64_t pixels_per_chunk_axis = 0;
    double object_prevalence = 0.0;
    double object_radius_px = 0.0;
    float foreground_intensity = 1.0f;
    float background_intensity = 0.0f;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
};

/// A rendered scene: the full intensity pyramid (level k+1 is the 2x-per-axis
/// mean-pool of level k), chunk-level ground truth, the clean pixel mask at
/// L0 resolution, and the ground-truth object centroids in L0 pixel
/// coordinates.
struct labeled_pyramid {
    std::vector<nd_array<float>> images;
    std::vector<std::uint8_t> l0_chunk_labels;
    nd_array<std::uint8_t> segmentation_mask;
    std::vector<std::vector<double>> object_centroids;
};

/// Deterministic given cfg.seed.
labeled_pyramid generate_scene(const synth_scene_config& cfg);

/// Wraps a scene as an engine data source.
memory_chunk_source scene_source(const synth_scene_config& cfg, const labeled_pyramid& scene);

/// Writes the scene's pyramid as a chunk directory (manifest + raw files),
/// readable by directory_chunk_source.
void export_scene(const std::filesystem::path& root, const synth_scene_config& cfg,
                  const labeled_pyramid& scene);

/// Classifier that fires iff at least min_hot_pixels pixels of the chunk are
/// >= threshold; the hot-pixel floor acts as a within-chunk area filter on
/// the thresholded mask. Pure and safe for concurrent use.
std::unique_ptr<chunk_classifier> make_threshold_classifier(int level, float threshold,
                                                            std::int64_t min_hot_pixels);

enum class connectivity {
    face,  ///< 2d neighbours (orthogonal steps only)
    full   ///< 3^d - 1 neighbours (diagonals included)
};

/// One connected component of a binary mask.
struct component {
    std::vector<std::int64_t> pixels;  ///< row-major linear indices
    std::vector<double> centroid;      ///< mean pixel coordinate per axis

    std::int64_t area() const { return static_cast<std::int64_t>(pixels.size()); }
};

/// Flood-fill labeling of an n-dimensional mask.
std::vector<component> connected_components(const nd_array<std::uint8_t>& mask, connectivity conn);

/// Keeps components with area >= min_area_px (strictly-below is dropped).
std::vector<component> area_filter(std::vector<component> components, std::int64_t min_area_px);

/// Greedy one-to-one matching by ascending distance within match_radius_px.
/// recall = matched/|truth|, precision = matched/|detections|; either is
/// unset when its denominator is empty.
struct detection_scores {
    std::optional<double> recall;
    std::optional<double> precision;
    std::int64_t matched = 0;
};

detection_scores detection_metrics(const std::vector<std::vector<double>>& detections,
                                   const std::vector<std::vector<double>>& ground_truth_centroids,
                                   double match_radius_px);

/// Measured (tpr, fpr) of a classifier over every chunk of one level,
/// against the given per-chunk labels. The calibration half of the
/// synthetic benchmark.
struct measured_rates {
    double tpr = 0.0;
    double fpr = 0.0;
    std::int64_t positives = 0;
    std::int64_t negatives = 0;
};

measured_rates measure_chunk_rates(const chunk_classifier& classifier, const chunk_source& source,
                                   const std::vector<std::uint8_t>& level_labels);

}  // namespace casdet
