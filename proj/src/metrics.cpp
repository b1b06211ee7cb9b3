#include "wavefoa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace wavefoa {

namespace {

std::pair<double, double> mean_and_std(const ScalarField& f) {
    const auto vals = f.values();
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size());
    return {mean, std::sqrt(var)};
}

std::vector<int> region_string(const Scanpath& p, const Grid& g, int rows, int cols) {
    std::vector<int> s;
    s.reserve(p.fixations.size());
    for (const Fixation& f : p.fixations) {
        const int col = std::clamp(static_cast<int>(std::floor(f.x * cols / g.width)), 0,
                                   cols - 1);
        const int row = std::clamp(static_cast<int>(std::floor(f.y * rows / g.height)), 0,
                                   rows - 1);
        s.push_back(row * cols + col);
    }
    return s;
}

int levenshtein(const std::vector<int>& a, const std::vector<int>& b) {
    const size_t n = a.size();
    const size_t m = b.size();
    std::vector<int> prev(m + 1), curr(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= n; ++i) {
        curr[0] = static_cast<int>(i);
        for (size_t j = 1; j <= m; ++j) {
            const int subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, subst});
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

// All consecutive k-tuples of fixation positions, scaled by 1/diag,
// flattened to R^{2k}.
std::vector<std::vector<double>> embed(const Scanpath& p, int k, double inv_diag) {
    std::vector<std::vector<double>> tuples;
    const size_t n = p.fixations.size();
    for (size_t i = 0; i + k <= n; ++i) {
        std::vector<double> t;
        t.reserve(static_cast<size_t>(2 * k));
        for (int j = 0; j < k; ++j) {
            t.push_back(p.fixations[i + j].x * inv_diag);
            t.push_back(p.fixations[i + j].y * inv_diag);
        }
        tuples.push_back(std::move(t));
    }
    return tuples;
}

double directed_tde(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
    double score = 0.0;
    for (const auto& ta : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& tb : b) {
            double d2 = 0.0;
            for (size_t i = 0; i < ta.size(); ++i) {
                const double d = ta[i] - tb[i];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        score += std::exp(-std::sqrt(best));
    }
    return score / static_cast<double>(a.size());
}

} // namespace

double nss(const ScalarField& sal, const FixationSet& fix) {
    if (fix.points.empty()) throw EmptyInputError("no fixations for NSS");
    const auto [mean, sd] = mean_and_std(sal);
    if (sd <= 1e-12 * std::max(sal.max_abs(), 1e-300))
        throw DegenerateMapError("saliency map has zero standard deviation");
    double acc = 0.0;
    for (const Vec2& p : fix.points) acc += (bilinear_sample(sal, p) - mean) / sd;
    return acc / static_cast<double>(fix.points.size());
}

double auc_judd(const ScalarField& sal, const FixationSet& fix) {
    if (fix.points.empty()) throw EmptyInputError("no fixations for AUC");
    const Grid& g = sal.grid();

    std::vector<char> fixated(static_cast<size_t>(g.size()), 0);
    for (const Vec2& p : fix.points) {
        const int x = std::clamp(static_cast<int>(std::lround(p.x)), 0, g.width - 1);
        const int y = std::clamp(static_cast<int>(std::lround(p.y)), 0, g.height - 1);
        fixated[static_cast<size_t>(g.index(x, y))] = 1;
    }
    std::vector<double> pos, neg;
    for (int i = 0; i < g.size(); ++i) {
        if (fixated[static_cast<size_t>(i)])
            pos.push_back(sal.values()[static_cast<size_t>(i)]);
        else
            neg.push_back(sal.values()[static_cast<size_t>(i)]);
    }
    if (neg.empty()) return 1.0;

    // Threshold sweep over the fixated values; equal-valued negatives
    // count half, which equals the trapezoidal ROC area.
    std::sort(neg.begin(), neg.end());
    double acc = 0.0;
    for (double v : pos) {
        const auto lo = std::lower_bound(neg.begin(), neg.end(), v);
        const auto hi = std::upper_bound(neg.begin(), neg.end(), v);
        const double below = static_cast<double>(lo - neg.begin());
        const double ties = static_cast<double>(hi - lo);
        acc += (below + 0.5 * ties) / static_cast<double>(neg.size());
    }
    return acc / static_cast<double>(pos.size());
}

int sed(const Scanpath& a, const Scanpath& b, const Grid& retina, int rows, int cols) {
    if (rows < 1 || cols < 1) throw ConfigError("region grid must be at least 1x1");
    return levenshtein(region_string(a, retina, rows, cols),
                       region_string(b, retina, rows, cols));
}

double stde(const Scanpath& a, const Scanpath& b, const Grid& retina, int k) {
    if (k < 1) throw ConfigError("embedding length must be >= 1");
    if (a.fixations.size() < static_cast<size_t>(k) ||
        b.fixations.size() < static_cast<size_t>(k))
        throw PathTooShortError("scanpath shorter than the embedding length");
    const double diag = std::hypot(retina.width - 1.0, retina.height - 1.0);
    if (diag <= 0.0) throw ConfigError("retina diagonal must be positive");
    const auto ea = embed(a, k, 1.0 / diag);
    const auto eb = embed(b, k, 1.0 / diag);
    return 0.5 * (directed_tde(ea, eb) + directed_tde(eb, ea));
}

MetricReport aggregate(const std::vector<Scanpath>& model_paths,
                       const std::vector<Scanpath>& human_paths, const Grid& retina,
                       const MetricsConfig& cfg) {
    if (model_paths.empty() || human_paths.empty())
        throw EmptyInputError("aggregate needs model and human scanpaths");

    MetricReport rep;
    rep.sed_best = std::numeric_limits<double>::infinity();
    rep.stde_best = 0.0;
    double sed_sum = 0.0, stde_sum = 0.0;
    for (const Scanpath& m : model_paths) {
        for (const Scanpath& h : human_paths) {
            const int d = sed(m, h, retina, cfg.sed_rows, cfg.sed_cols);
            sed_sum += d;
            rep.sed_best = std::min(rep.sed_best, static_cast<double>(d));

            // Clamp the embedding to the shorter path so single-fixation
            // paths still compare; an empty path has similarity 0.
            const int k_eff = static_cast<int>(std::min({static_cast<size_t>(cfg.stde_k),
                                                         m.fixations.size(),
                                                         h.fixations.size()}));
            const double s = k_eff >= 1 ? stde(m, h, retina, k_eff) : 0.0;
            stde_sum += s;
            rep.stde_best = std::max(rep.stde_best, s);
        }
    }
    const double n_pairs = static_cast<double>(model_paths.size() * human_paths.size());
    rep.sed_mean = sed_sum / n_pairs;
    rep.stde_mean = stde_sum / n_pairs;
    return rep;
}

} // namespace wavefoa
