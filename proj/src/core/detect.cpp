#include "core/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "core/errors.hpp"

namespace meshdetect {

namespace {

std::array<uint32_t, kFsmStateCount> matrix_row(const TransitionMatrix& t, int row) {
    std::array<uint32_t, kFsmStateCount> out;
    for (int j = 0; j < kFsmStateCount; ++j) out[j] = t[row * kFsmStateCount + j];
    return out;
}

RowTestResult row_test_with_critical(const std::array<uint32_t, kFsmStateCount>& row_r,
                                     const std::array<uint32_t, kFsmStateCount>& row_s,
                                     double critical, uint32_t min_row_total) {
    uint64_t total_r = 0;
    uint64_t total_s = 0;
    for (int j = 0; j < kFsmStateCount; ++j) {
        total_r += row_r[j];
        total_s += row_s[j];
    }
    if (total_r < min_row_total || total_s < min_row_total) return RowTestResult{false, 0.0, false};
    const double fr = static_cast<double>(total_r);
    const double fs = static_cast<double>(total_s);
    double chi2 = 0.0;
    for (int j = 0; j < kFsmStateCount; ++j) {
        const uint64_t combined = static_cast<uint64_t>(row_r[j]) + row_s[j];
        if (combined == 0) continue;
        const double share = static_cast<double>(combined) / (fr + fs);
        const double er = fr * share;
        const double es = fs * share;
        const double dr = static_cast<double>(row_r[j]) - er;
        const double ds = static_cast<double>(row_s[j]) - es;
        chi2 += dr * dr / er + ds * ds / es;
    }
    return RowTestResult{true, chi2, chi2 > critical};
}

SimilarityResult similarity_with_critical(const TransitionMatrix& tr, const TransitionMatrix& ts,
                                          double alpha, uint32_t min_row_total, double critical) {
    int s = 0;
    for (int i = 0; i < kFsmStateCount; ++i) {
        const RowTestResult res =
            row_test_with_critical(matrix_row(tr, i), matrix_row(ts, i), critical, min_row_total);
        if (res.reject) ++s;
    }
    return SimilarityResult{std::pow(alpha, s), s};
}

} // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Cooperative: return "cooperative";
    case Verdict::Selfish: return "selfish";
    case Verdict::Unascertained: return "unascertained";
    }
    return "unascertained";
}

double chi2_critical(int df, double alpha) {
    boost::math::chi_squared_distribution<double> dist(static_cast<double>(df));
    return boost::math::quantile(boost::math::complement(dist, alpha));
}

RowTestResult pearson_row_test(const std::array<uint32_t, kFsmStateCount>& row_r,
                               const std::array<uint32_t, kFsmStateCount>& row_s, double alpha,
                               uint32_t min_row_total) {
    return row_test_with_critical(row_r, row_s, chi2_critical(kFsmStateCount - 1, alpha),
                                  min_row_total);
}

SimilarityResult similarity_L(const TransitionMatrix& tr, const TransitionMatrix& ts,
                              const DetectorParams& params) {
    return similarity_with_critical(tr, ts, params.alpha, params.min_row_total,
                                    chi2_critical(kFsmStateCount - 1, params.alpha));
}

double dissimilarity(const std::vector<std::vector<double>>& l, size_t r, size_t s) {
    const size_t n = l.size();
    if (n < 3) return std::clamp(1.0 - l[r][s], 0.0, 1.0);
    double n_rs = 0.0;
    double n_r = 0.0;
    double n_s = 0.0;
    for (size_t t = 0; t < n; ++t) {
        if (t == r || t == s) continue;
        n_rs += std::min(l[r][t], l[s][t]);
        n_r += l[r][t];
        n_s += l[s][t];
    }
    const double d = 1.0 - (n_rs * n_rs) / (n_r * n_s);
    return std::clamp(d, 0.0, 1.0);
}

std::vector<std::vector<double>> dissimilarity_matrix(const std::vector<std::vector<double>>& l) {
    const size_t n = l.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (size_t r = 0; r < n; ++r) {
        for (size_t s = r + 1; s < n; ++s) {
            const double v = dissimilarity(l, r, s);
            d[r][s] = v;
            d[s][r] = v;
        }
    }
    return d;
}

std::vector<int> Dendrogram::cut(int k) const {
    std::vector<int> label(size);
    std::iota(label.begin(), label.end(), 0);
    const int steps = size - k;
    // Each merge joins two clusters identified by their minimum members; the
    // merged cluster keeps the smaller one, so relabeling b -> a suffices.
    for (int i = 0; i < steps; ++i) {
        const DendrogramMerge& m = merges[i];
        for (int& l : label) {
            if (l == m.b) l = m.a;
        }
    }
    return label;
}

Dendrogram single_linkage(const std::vector<std::vector<double>>& dist) {
    const int n = static_cast<int>(dist.size());
    Dendrogram out;
    out.size = n;
    if (n < 2) return out;
    std::vector<int> rep(n);
    std::iota(rep.begin(), rep.end(), 0);
    std::vector<std::vector<double>> cd = dist;
    std::vector<int> active(n);
    std::iota(active.begin(), active.end(), 0);
    while (active.size() > 1) {
        size_t best_i = 0;
        size_t best_j = 1;
        double best = 0.0;
        bool first = true;
        for (size_t i = 0; i < active.size(); ++i) {
            for (size_t j = i + 1; j < active.size(); ++j) {
                const double d = cd[active[i]][active[j]];
                if (!first && d > best) continue;
                const int lo = std::min(rep[active[i]], rep[active[j]]);
                const int hi = std::max(rep[active[i]], rep[active[j]]);
                if (first || d < best) {
                    best = d;
                    best_i = i;
                    best_j = j;
                    first = false;
                    continue;
                }
                const int cur_lo = std::min(rep[active[best_i]], rep[active[best_j]]);
                const int cur_hi = std::max(rep[active[best_i]], rep[active[best_j]]);
                if (lo < cur_lo || (lo == cur_lo && hi < cur_hi)) {
                    best_i = i;
                    best_j = j;
                }
            }
        }
        const int ci = active[best_i];
        const int cj = active[best_j];
        const int a = std::min(rep[ci], rep[cj]);
        const int b = std::max(rep[ci], rep[cj]);
        out.merges.push_back(DendrogramMerge{a, b, best});
        for (int t : active) {
            if (t == ci || t == cj) continue;
            const double m = std::min(cd[ci][t], cd[cj][t]);
            cd[ci][t] = m;
            cd[t][ci] = m;
        }
        rep[ci] = a;
        active.erase(active.begin() + static_cast<ptrdiff_t>(best_j));
    }
    return out;
}

double cooperation_score(const TransitionMatrix& t) {
    static constexpr std::pair<int, int> kGood[] = {{3, 4}, {6, 7}, {4, 7}, {3, 7}};
    static constexpr std::pair<int, int> kBad[] = {{3, 5}, {6, 8}};
    uint64_t good = 0;
    for (const auto& [i, j] : kGood) good += t[(i - 1) * kFsmStateCount + (j - 1)];
    uint64_t bad = 0;
    for (const auto& [i, j] : kBad) bad += t[(i - 1) * kFsmStateCount + (j - 1)];
    return static_cast<double>(good) / 4.0 - static_cast<double>(bad) / 2.0;
}

double anova_p(const std::vector<std::vector<double>>& groups) {
    const size_t k = groups.size();
    size_t n = 0;
    for (const auto& g : groups) {
        if (g.empty()) throw InsufficientData("empty score group");
        n += g.size();
    }
    if (k < 2 || n <= k) throw InsufficientData("too few scores for the group count");

    bool all_identical = true;
    bool groups_constant = true;
    const double first = groups[0][0];
    for (const auto& g : groups) {
        for (double x : g) {
            if (x != first) all_identical = false;
            if (x != g[0]) groups_constant = false;
        }
    }
    if (all_identical) return 1.0;
    if (groups_constant) return 0.0;

    double grand = 0.0;
    for (const auto& g : groups) grand = std::accumulate(g.begin(), g.end(), grand);
    grand /= static_cast<double>(n);
    double ssb = 0.0;
    double ssw = 0.0;
    for (const auto& g : groups) {
        const double mean =
            std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
        for (double x : g) ssw += (x - mean) * (x - mean);
    }
    if (ssb < 0.0) ssb = 0.0;
    const double f = (ssb / static_cast<double>(k - 1)) / (ssw / static_cast<double>(n - k));
    boost::math::fisher_f_distribution<double> dist(static_cast<double>(k - 1),
                                                    static_cast<double>(n - k));
    return boost::math::cdf(boost::math::complement(dist, f));
}

ClassificationResult classify(const Dendrogram& dendro, const std::vector<double>& scores,
                              const DetectorParams& params) {
    const int r = dendro.size;
    ClassificationResult out;
    out.scores = scores;
    out.verdicts.assign(static_cast<size_t>(r), Verdict::Unascertained);
    double p_prev = 1.0;
    for (int k = 2; k <= r; ++k) {
        const std::vector<int> labels = dendro.cut(k);
        std::vector<int> order;
        for (int l : labels) {
            if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
        }
        std::sort(order.begin(), order.end());
        std::vector<std::vector<double>> groups(order.size());
        for (int i = 0; i < r; ++i) {
            const size_t gi = static_cast<size_t>(
                std::find(order.begin(), order.end(), labels[i]) - order.begin());
            groups[gi].push_back(scores[i]);
        }
        double p = 0.0;
        try {
            p = anova_p(groups);
        } catch (const InsufficientData&) {
            continue;
        }
        out.p_sequence.emplace_back(k, p);
        if (p < params.beta) {
            size_t lowest = 0;
            double lowest_mean = 0.0;
            for (size_t gi = 0; gi < groups.size(); ++gi) {
                const double mean =
                    std::accumulate(groups[gi].begin(), groups[gi].end(), 0.0) /
                    static_cast<double>(groups[gi].size());
                if (gi == 0 || mean < lowest_mean) {
                    lowest = gi;
                    lowest_mean = mean;
                }
            }
            const int selfish_label = order[lowest];
            for (int i = 0; i < r; ++i) {
                out.verdicts[i] =
                    labels[i] == selfish_label ? Verdict::Selfish : Verdict::Cooperative;
            }
            out.chosen_k = k;
            return out;
        }
        if (p > p_prev) {
            std::fill(out.verdicts.begin(), out.verdicts.end(), Verdict::Cooperative);
            return out;
        }
        p_prev = p;
    }
    return out;
}

ClassificationResult detect_monitor(const std::vector<TransitionMatrix>& aggregates,
                                    const DetectorParams& params) {
    const size_t r = aggregates.size();
    std::vector<double> scores(r);
    for (size_t i = 0; i < r; ++i) scores[i] = cooperation_score(aggregates[i]);
    if (r == 0) return ClassificationResult{};
    const double critical = chi2_critical(kFsmStateCount - 1, params.alpha);
    std::vector<std::vector<double>> l(r, std::vector<double>(r, 1.0));
    for (size_t a = 0; a < r; ++a) {
        for (size_t b = a + 1; b < r; ++b) {
            const SimilarityResult sim = similarity_with_critical(
                aggregates[a], aggregates[b], params.alpha, params.min_row_total, critical);
            l[a][b] = sim.L;
            l[b][a] = sim.L;
        }
    }
    const Dendrogram dendro = single_linkage(dissimilarity_matrix(l));
    return classify(dendro, scores, params);
}

} // namespace meshdetect
