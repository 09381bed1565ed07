#pragma once

#include <array>
#include <cstdint>
#include <vector>

// Reference implementations used only to check the library's numerics and
// algorithms. Written from the underlying definitions (series/continued
// fractions, brute-force scans) rather than sharing any library code.
namespace oracles {

// Regularized upper incomplete gamma Q(a, x).
double gammq(double a, double x);

// Upper tail of the chi-squared distribution with df degrees of freedom.
double chi2_sf(double x, int df);

// x such that chi2_sf(x, df) == alpha, by bisection.
double chi2_critical(int df, double alpha);

// Regularized incomplete beta I_x(a, b).
double betai(double a, double b, double x);

// Upper tail of the F distribution.
double f_sf(double f, int d1, int d2);

// Homogeneity chi-squared statistic of two count rows, pooled expectations,
// columns with zero combined count skipped.
double row_chi2(const std::vector<uint32_t>& row_r, const std::vector<uint32_t>& row_s);

// One-way ANOVA p-value (no degenerate-case handling; callers feed data with
// positive within-group variance).
double anova_p(const std::vector<std::vector<double>>& groups);

struct Merge {
    int a = 0;
    int b = 0;
    double height = 0.0;
};

// Single-linkage agglomeration by brute-force minimum point-pair scan.
// Clusters are named by their minimum member; exact ties pick the
// lexicographically smallest (min(a,b), max(a,b)) pair.
std::vector<Merge> single_linkage(const std::vector<std::vector<double>>& dist);

// Membership after cutting to k clusters, labels = minimum member.
std::vector<int> cut(int n, const std::vector<Merge>& merges, int k);

// O(n^2) adjacency scan: pairs within range (inclusive).
std::vector<std::pair<uint32_t, uint32_t>> adjacent_pairs(const std::vector<double>& xs,
                                                          const std::vector<double>& ys,
                                                          double range);

} // namespace oracles
