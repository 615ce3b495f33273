#pragma once

#include "msopt/spectrum.hpp"
#include "msopt/stochastic.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace msopt {

enum class InnerSolver { bsls, acbsls };

InnerSolver parse_inner(std::string_view name);
std::string to_string(InnerSolver s);

struct SearchParams {
    std::size_t m = 1;
    double mu1 = 1.0;
    double Lm = 1.0;
    double pi_kappa = 1.0;  // product of the band condition numbers
    double eps = 1e-6;
    InnerSolver inner = InnerSolver::bsls;
};

void validate_search_params(const SearchParams& p);

// Band i is [2^mu_log[i], 2^L_log[i]].
struct CandidateParams {
    std::vector<int> mu_log;
    std::vector<int> L_log;

    std::size_t m() const { return mu_log.size(); }
    BandSpec bands() const;
    bool operator==(const CandidateParams&) const = default;
};

// Merges neighbours while L_log[i] >= mu_log[i+1]. The merged band keeps the
// larger upper end so that it still covers both inputs.
CandidateParams merge_overlapping(CandidateParams c);

int pi_kappa_log(const SearchParams& p);
int mu1_log(const SearchParams& p);
int Lm_log(const SearchParams& p);

// Candidates before merging, in search order: kappa-log compositions in
// lexicographic order, then nondecreasing mu-log grids with mu_log[0] fixed
// at floor(log2 mu1).
void for_each_candidate(const SearchParams& p, const std::function<bool(const CandidateParams&)>& fn);
std::vector<CandidateParams> enumerate_candidates(const SearchParams& p);
long long candidate_count(const SearchParams& p);

// Upper bound on the queries of one inner run for any candidate.
double inner_budget(const SearchParams& p, double gap0);

struct InnerRun {
    Vec x;
    long long queries = 0;
    bool diverged = false;
};

using InnerFn = std::function<InnerRun(const BandSpec& bands)>;
using GapFn = std::function<double(const Vec& x)>;

struct SearchResult {
    Vec x;
    long long candidate_index = -1;  // -1 when x0 already met the target
    long long candidates_tried = 0;
    long long queries = 0;
    double gap = 0.0;
    CandidateParams candidate;
};

// Throws NotFound when every candidate fails.
SearchResult search_with(const SearchParams& p, const Vec& x0, const GapFn& gap, const InnerFn& inner);
SearchResult search(Oracle& oracle, const SearchParams& p, const Vec& x0, const GapFn& gap);
// Uses the oracle's value and a known optimal value.
SearchResult search(Oracle& oracle, const SearchParams& p, const Vec& x0, double f_star);

// Empirical objective (1/2n) sum (a'x - b)^2 over a fixed evaluation set.
class EmpiricalObjective {
public:
    EmpiricalObjective(Sampler& sampler, long long n);
    double operator()(const Vec& x) const;

private:
    Mat A_;
    Vec b_;
};

// Search with bsls_stoch as the inner solver, batch size n_avg, and the
// empirical objective over n_eval samples as the acceptance test.
SearchResult search_stoch(Sampler& sampler, const SearchParams& p, const Vec& x0, long long n_eval,
                          long long n_avg);

}  // namespace msopt
