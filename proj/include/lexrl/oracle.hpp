#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace lexrl {

inline constexpr double kOracleTolerance = 1e-9;

/// Explicit finite MDP with one transition matrix per action and one
/// S x S cost table per (channel, action). `thresholds` are the discounted
/// bounds K_1..K_C themselves, not raw chance probabilities.
struct TabularMdp {
    int num_states = 0;
    int num_actions = 0;
    int num_constraints = 0;
    std::vector<Eigen::MatrixXd> transitions;         // transitions[u](s, s')
    std::vector<std::vector<Eigen::MatrixXd>> costs;  // costs[channel][u](s, s')
    double gamma = 0.0;
    std::vector<double> thresholds;
    Eigen::VectorXd initial;

    /// Row-stochasticity within 1e-12, non-negative costs, a proper initial
    /// distribution, gamma in (0,1) and one threshold per constraint.
    void validate() const;
};

/// Action per state, length num_states.
using DeterministicPolicy = std::vector<int>;

void validate_policy(const TabularMdp& mdp, const DeterministicPolicy& policy);

/// Exact Q_channel^policy(s, u) for every state-action pair, solved through
/// the linear fixed point of the policy's value function.
Eigen::MatrixXd policy_q_values(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                int channel);

/// On-policy values per channel: values[c](s) = Q_c^policy(s, policy(s)).
struct PolicyEvaluation {
    std::vector<Eigen::VectorXd> values;
};

PolicyEvaluation evaluate_policy(const TabularMdp& mdp, const DeterministicPolicy& policy);

/// Initial-distribution average of the on-policy channel value.
double expected_cost(const TabularMdp& mdp, const DeterministicPolicy& policy, int channel);

/// Eq. (9) tuple at (state, action), highest-priority slot last:
/// (max(K_C, Q_C), ..., max(K_1, Q_1), Q_0).
std::vector<double> vectorial_value(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                    int state, int action);

/// Number of ordered constraints met consecutively from channel 1 at
/// `state`, judged with `tol` slack on each threshold.
int met_constraint_count(const TabularMdp& mdp, const PolicyEvaluation& eval, int state,
                         double tol = kOracleTolerance);

enum class LexOrdering { Better, Worse, Equal };

/// Three-case lexicographic comparison of two policies at one state: more
/// met constraints wins; on equal counts the first unmet channel (or the
/// primary channel when all are met) decides by strictly smaller value.
LexOrdering lex_compare(const TabularMdp& mdp, const DeterministicPolicy& lhs,
                        const DeterministicPolicy& rhs, int state,
                        double tol = kOracleTolerance);

enum class FeasibilityClass { FeasibleFor10, FeasibleFor6Only, Infeasible };

/// Per-state constraint satisfaction (problem (10)), initial-distribution
/// averaged satisfaction only (problem (6)), or neither.
FeasibilityClass feasibility_check(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                   double tol = kOracleTolerance);

struct BruteForceResult {
    DeterministicPolicy policy;
    /// True when `policy` compares weakly better at every state against
    /// every enumerated rival; otherwise `policy` is merely undominated.
    bool strongly_optimal = false;
    std::int64_t policies_searched = 0;
    /// All undominated policies in encoding order; filled only on request.
    std::vector<DeterministicPolicy> undominated;
};

/// Exhaustive enumeration of deterministic policies in lexicographic
/// encoding order (state 0 the most significant digit). Returns the first
/// policy that is weakly best at every state if one exists; otherwise the
/// first policy no rival strictly dominates, preferring per-state-feasible
/// ones. Throws when num_actions^num_states exceeds `budget`.
BruteForceResult brute_force_lex_optimal(const TabularMdp& mdp, std::int64_t budget = 10000,
                                         bool collect_undominated = false,
                                         double tol = kOracleTolerance);

/// Text format, line oriented, '#' comments:
///   states N / actions N / constraints N / gamma X
///   thresholds K_1 .. K_C            (required iff constraints > 0)
///   initial x_0 .. x_{S-1}
///   transition U followed by S rows of S probabilities
///   cost V U  followed by S rows of S values, for every channel and action
/// Parse failures raise ParseError with a line number; the loaded MDP is
/// validated before being returned.
TabularMdp load_tabular_mdp(const std::filesystem::path& path);

}  // namespace lexrl
