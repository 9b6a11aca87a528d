#include "casdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "casdet/rng.hpp"

namespace casdet {

static void validate_scene_config(const synth_scene_config& cfg) {
    if (cfg.pixels_per_chunk_axis < 1) {
        throw std::invalid_argument("scene.pixels_per_chunk_axis must be >= 1");
    }
    if (!(cfg.object_prevalence >= 0.0 && cfg.object_prevalence <= 1.0)) {
        throw std::invalid_argument("scene.object_prevalence must be in [0, 1]");
    }
    if (!(cfg.foreground_intensity > cfg.background_intensity)) {
        throw std::invalid_argument("scene.foreground_intensity must exceed scene.background_intensity");
    }
    if (!(cfg.object_radius_px > 0.0)) {
        throw std::invalid_argument("scene.object_radius_px must be positive");
    }
    if (cfg.object_radius_px >= static_cast<double>(cfg.pixels_per_chunk_axis)) {
        throw std::invalid_argument("scene.object_radius_px must be smaller than the chunk extent");
    }
    if (cfg.noise_std < 0.0) {
        throw std::invalid_argument("scene.noise_std must be >= 0");
    }
}

static std::vector<std::int64_t> l0_image_shape(const synth_scene_config& cfg) {
    std::vector<std::int64_t> shape(cfg.spec.l0_chunks_per_axis);
    for (auto& s : shape) {
        s *= cfg.pixels_per_chunk_axis;
    }
    return shape;
}

// paints the ball into image and mask over its bounding box; pixel centers
// at integer coordinate + 0.5
static void render_ball(nd_array<float>& image, nd_array<std::uint8_t>& mask,
                        const std::vector<double>& centroid, double radius, float foreground) {
    const int d = static_cast<int>(image.shape.size());
    std::vector<std::int64_t> lo(d), hi(d), cur(d);
    for (int i = 0; i < d; ++i) {
        lo[i] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(centroid[i] - radius - 0.5)));
        hi[i] = std::min<std::int64_t>(image.shape[i] - 1,
                                       static_cast<std::int64_t>(std::ceil(centroid[i] + radius - 0.5)));
        if (lo[i] > hi[i]) {
            return;
        }
        cur[i] = lo[i];
    }
    const double r2 = radius * radius;
    while (true) {
        double dist2 = 0.0;
        for (int i = 0; i < d; ++i) {
            const double delta = static_cast<double>(cur[i]) + 0.5 - centroid[i];
            dist2 += delta * delta;
        }
        if (dist2 <= r2) {
            const std::size_t off = static_cast<std::size_t>(image.offset(cur));
            image.data[off] = foreground;
            mask.data[off] = 1;
        }
        int axis = d - 1;
        while (axis >= 0 && ++cur[axis] > hi[axis]) {
            cur[axis] = lo[axis];
            --axis;
        }
        if (axis < 0) {
            break;
        }
    }
}

// 2x-per-axis mean-pool; preserves the global mean exactly up to rounding
static nd_array<float> mean_pool(const nd_array<float>& src) {
    const int d = static_cast<int>(src.shape.size());
    std::vector<std::int64_t> out_shape(src.shape);
    for (auto& s : out_shape) {
        s /= 2;
    }
    nd_array<float> out(out_shape);
    const double inv = 1.0 / std::ldexp(1.0, d);
    std::vector<std::int64_t> cur(d, 0), child(d);
    for (std::int64_t off = 0; off < out.size(); ++off) {
        double acc = 0.0;
        for (std::int64_t bits = 0; bits < (std::int64_t{1} << d); ++bits) {
            for (int i = 0; i < d; ++i) {
                child[i] = cur[i] * 2 + ((bits >> (d - 1 - i)) & 1);
            }
            acc += src.data[static_cast<std::size_t>(src.offset(child))];
        }
        out.data[static_cast<std::size_t>(off)] = static_cast<float>(acc * inv);
        int axis = d - 1;
        while (axis >= 0 && ++cur[axis] >= out_shape[axis]) {
            cur[axis] = 0;
            --axis;
        }
    }
    return out;
}

labeled_pyramid generate_scene(const synth_scene_config& cfg) {
    validate_scene_config(cfg);
    const pyramid_spec& spec = cfg.spec;
    const std::int64_t ppc = cfg.pixels_per_chunk_axis;
    const std::int64_t n0 = chunk_count(spec, 0);

    labeled_pyramid scene;
    scene.l0_chunk_labels.assign(static_cast<std::size_t>(n0), 0);

    // one stream drives the whole scene; draws happen in a fixed order:
    // per-chunk presence + centroid first, then per-pixel noise
    rng_stream g(cfg.seed, 0);
    for (std::int64_t c = 0; c < n0; ++c) {
        if (!g.next_bernoulli(cfg.object_prevalence)) {
            continue;
        }
        scene.l0_chunk_labels[static_cast<std::size_t>(c)] = 1;
        const chunk_index idx = index_from_linear(spec, 0, c);
        std::vector<double> centroid(static_cast<std::size_t>(spec.dim));
        for (int i = 0; i < spec.dim; ++i) {
            centroid[static_cast<std::size_t>(i)] =
                static_cast<double>(idx.coords[static_cast<std::size_t>(i)] * ppc) +
                g.next_unit() * static_cast<double>(ppc);
        }
        scene.object_centroids.push_back(std::move(centroid));
    }

    nd_array<float> l0(l0_image_shape(cfg), cfg.background_intensity);
    scene.segmentation_mask = nd_array<std::uint8_t>(l0.shape, 0);
    for (const auto& centroid : scene.object_centroids) {
        render_ball(l0, scene.segmentation_mask, centroid, cfg.object_radius_px, cfg.foreground_intensity);
    }
    if (cfg.noise_std > 0.0) {
        for (auto& v : l0.data) {
            v = static_cast<float>(v + g.next_normal(0.0, cfg.noise_std));
        }
    }

    scene.images.reserve(static_cast<std::size_t>(spec.levels));
    scene.images.push_back(std::move(l0));
    for (int k = 1; k < spec.levels; ++k) {
        scene.images.push_back(mean_pool(scene.images.back()));
    }
    return scene;
}

memory_chunk_source scene_source(const synth_scene_config& cfg, const labeled_pyramid& scene) {
    return memory_chunk_source(cfg.spec, cfg.pixels_per_chunk_axis, scene.images);
}

void export_scene(const std::filesystem::path& root, const synth_scene_config& cfg,
                  const labeled_pyramid& scene) {
    write_chunk_directory(root, cfg.spec, cfg.pixels_per_chunk_axis, scene.images);
}

namespace {

class threshold_classifier final : public chunk_classifier {
public:
    threshold_classifier(int level, float threshold, std::int64_t min_hot_pixels)
        : level_(level), threshold_(threshold), min_hot_(min_hot_pixels) {}

    int level() const override { return level_; }
    bool concurrent_safe() const override { return true; }

    bool classify(const nd_array<float>& chunk) const override {
        std::int64_t hot = 0;
        for (float v : chunk.data) {
            hot += (v >= threshold_);
        }
        return hot >= min_hot_;
    }

private:
    int level_;
    float threshold_;
    std::int64_t min_hot_;
};

}  // namespace

std::unique_ptr<chunk_classifier> make_threshold_classifier(int level, float threshold,
                                                            std::int64_t min_hot_pixels) {
    return std::make_unique<threshold_classifier>(level, threshold, min_hot_pixels);
}

std::vector<component> connected_components(const nd_array<std::uint8_t>& mask, connectivity conn) {
    const int d = static_cast<int>(mask.shape.size());
    // neighbour offsets: orthogonal steps for face, all of {-1,0,1}^d \ {0}
    // for full
    std::vector<std::vector<std::int64_t>> offsets;
    if (conn == connectivity::face) {
        for (int i = 0; i < d; ++i) {
            for (int s : {-1, 1}) {
                std::vector<std::int64_t> off(static_cast<std::size_t>(d), 0);
                off[static_cast<std::size_t>(i)] = s;
                offsets.push_back(std::move(off));
            }
        }
    } else {
        std::vector<std::int64_t> off(static_cast<std::size_t>(d), -1);
        while (true) {
            if (std::any_of(off.begin(), off.end(), [](std::int64_t v) { return v != 0; })) {
                offsets.push_back(off);
            }
            int axis = d - 1;
            while (axis >= 0 && ++off[static_cast<std::size_t>(axis)] > 1) {
                off[static_cast<std::size_t>(axis)] = -1;
                --axis;
            }
            if (axis < 0) {
                break;
            }
        }
    }

    std::vector<std::uint8_t> seen(mask.data.size(), 0);
    std::vector<component> components;
    std::vector<std::int64_t> stack;
    for (std::int64_t start = 0; start < mask.size(); ++start) {
        if (!mask.data[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)]) {
            continue;
        }
        component comp;
        comp.centroid.assign(static_cast<std::size_t>(d), 0.0);
        stack.assign(1, start);
        seen[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            const std::int64_t cur = stack.back();
            stack.pop_back();
            comp.pixels.push_back(cur);
            const auto coords = coords_from_offset(mask.shape, cur);
            for (int i = 0; i < d; ++i) {
                comp.centroid[static_cast<std::size_t>(i)] += static_cast<double>(coords[static_cast<std::size_t>(i)]);
            }
            for (const auto& off : offsets) {
                std::int64_t lin = 0;
                bool inside = true;
                for (int i = 0; i < d; ++i) {
                    const std::int64_t x = coords[static_cast<std::size_t>(i)] + off[static_cast<std::size_t>(i)];
                    if (x < 0 || x >= mask.shape[static_cast<std::size_t>(i)]) {
                        inside = false;
                        break;
                    }
                    lin = lin * mask.shape[static_cast<std::size_t>(i)] + x;
                }
                if (inside && mask.data[static_cast<std::size_t>(lin)] &&
                    !seen[static_cast<std::size_t>(lin)]) {
                    seen[static_cast<std::size_t>(lin)] = 1;
                    stack.push_back(lin);
                }
            }
        }
        std::sort(comp.pixels.begin(), comp.pixels.end());
        for (auto& x : comp.centroid) {
            x /= static_cast<double>(comp.pixels.size());
        }
        components.push_back(std::move(comp));
    }
    return components;
}

std::vector<component> area_filter(std::vector<component> components, std::int64_t min_area_px) {
    std::erase_if(components, [&](const component& c) { return c.area() < min_area_px; });
    return components;
}

detection_scores detection_metrics(const std::vector<std::vector<double>>& detections,
                                   const std::vector<std::vector<double>>& truths,
                                   double match_radius_px) {
    struct pair_dist {
        double dist;
        std::size_t det, truth;
    };
    std::vector<pair_dist> pairs;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        for (std::size_t j = 0; j < truths.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t a = 0; a < truths[j].size(); ++a) {
                const double delta = detections[i][a] - truths[j][a];
                d2 += delta * delta;
            }
            const double dist = std::sqrt(d2);
            if (dist <= match_radius_px) {
                pairs.push_back({dist, i, j});
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const pair_dist& a, const pair_dist& b) {
        if (a.dist != b.dist) {
            return a.dist < b.dist;
        }
        if (a.det != b.det) {
            return a.det < b.det;
        }
        return a.truth < b.truth;
    });
    std::vector<std::uint8_t> det_used(detections.size(), 0), truth_used(truths.size(), 0);
    std::int64_t matched = 0;
    for (const auto& p : pairs) {
        if (!det_used[p.det] && !truth_used[p.truth]) {
            det_used[p.det] = 1;
            truth_used[p.truth] = 1;
            ++matched;
        }
    }
    detection_scores scores;
    scores.matched = matched;
    if (!truths.empty()) {
        scores.recall = static_cast<double>(matched) / static_cast<double>(truths.size());
    }
    if (!detections.empty()) {
        scores.precision = static_cast<double>(matched) / static_cast<double>(detections.size());
    }
    return scores;
}

measured_rates measure_chunk_rates(const chunk_classifier& classifier, const chunk_source& source,
                                   const std::vector<std::uint8_t>& level_labels) {
    const int level = classifier.level();
    const std::int64_t n = chunk_count(source.spec(), level);
    if (level_labels.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("measure_chunk_rates: label count does not match level " +
                                    std::to_string(level));
    }
    measured_rates rates;
    std::int64_t tp = 0, fp = 0;
    for (std::int64_t c = 0; c < n; ++c) {
        const bool positive = classifier.classify(source.read_chunk(index_from_linear(source.spec(), level, c)));
        if (level_labels[static_cast<std::size_t>(c)]) {
            ++rates.positives;
            tp += positive;
        } else {
            ++rates.negatives;
            fp += positive;
        }
    }
    rates.tpr = rates.positives ? static_cast<double>(tp) / static_cast<double>(rates.positives) : 0.0;
    rates.fpr = rates.negatives ? static_cast<double>(fp) / static_cast<double>(rates.negatives) : 0.0;
    return rates;
}

}  // namespace casdet
