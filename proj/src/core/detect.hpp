#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "core/monitor_hub.hpp"

namespace meshdetect {

enum class Verdict : uint8_t { Cooperative, Selfish, Unascertained };

const char* verdict_name(Verdict v);

struct DetectorParams {
    double alpha = 0.1;
    double beta = 0.4;
    uint32_t min_row_total = 5;
};

struct RowTestResult {
    bool applicable = false;
    double chi2 = 0.0;
    bool reject = false;
};

// Upper-tail critical value: P(chi2_df > value) == alpha.
double chi2_critical(int df, double alpha);

// Two-sample homogeneity test of one FSM row against another. Inapplicable
// (never rejecting) when either row's total is below min_row_total.
RowTestResult pearson_row_test(const std::array<uint32_t, kFsmStateCount>& row_r,
                               const std::array<uint32_t, kFsmStateCount>& row_s, double alpha,
                               uint32_t min_row_total);

struct SimilarityResult {
    double L = 1.0;
    int S = 0;
};

// L = alpha^S where S counts rows on which the two matrices differ
// significantly.
SimilarityResult similarity_L(const TransitionMatrix& tr, const TransitionMatrix& ts,
                              const DetectorParams& params);

// d_rs from third-party similarity profiles; requires a square similarity
// matrix with unit diagonal. With fewer than 3 nodes the caller should use
// 1 - L_rs instead (see dissimilarity_matrix).
double dissimilarity(const std::vector<std::vector<double>>& l, size_t r, size_t s);

std::vector<std::vector<double>> dissimilarity_matrix(const std::vector<std::vector<double>>& l);

struct DendrogramMerge {
    int a = 0; // representative (minimum member) of each merged cluster
    int b = 0;
    double height = 0.0;
};

struct Dendrogram {
    int size = 0;
    std::vector<DendrogramMerge> merges;

    // Cluster label (minimum member index) per element after merging down to
    // k clusters.
    std::vector<int> cut(int k) const;
};

Dendrogram single_linkage(const std::vector<std::vector<double>>& dist);

// C = (sum of completed-forwarding transition counts) / 4
//   - (sum of timeout-after-receipt transition counts) / 2.
double cooperation_score(const TransitionMatrix& t);

// One-way ANOVA p-value over score groups. Throws InsufficientData when a
// group is empty or the total observation count does not exceed the group
// count.
double anova_p(const std::vector<std::vector<double>>& groups);

struct ClassificationResult {
    std::vector<Verdict> verdicts; // aligned with the input node order
    std::vector<double> scores;
    std::vector<std::pair<int, double>> p_sequence; // (k, P_k) actually computed
    std::optional<int> chosen_k;                    // set when a split was accepted
};

ClassificationResult classify(const Dendrogram& dendro, const std::vector<double>& scores,
                              const DetectorParams& params);

// Full per-monitor pipeline over the aggregate matrices of its neighbors.
ClassificationResult detect_monitor(const std::vector<TransitionMatrix>& aggregates,
                                    const DetectorParams& params);

} // namespace meshdetect
