#include "lexrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "lexrl/errors.hpp"
#include "lexrl/text.hpp"

namespace lexrl {

namespace {

constexpr double kStochasticTolerance = 1e-12;

void check_channel(const TabularMdp& mdp, int channel) {
    if (channel < 0 || channel > mdp.num_constraints) {
        throw std::out_of_range("oracle: channel " + std::to_string(channel) + " outside [0, " +
                                std::to_string(mdp.num_constraints) + "]");
    }
}

void check_state(const TabularMdp& mdp, int state) {
    if (state < 0 || state >= mdp.num_states) {
        throw std::out_of_range("oracle: state index out of range");
    }
}

// V(s) = Q_channel^policy(s, policy(s)) via the exact linear fixed point
// (I - gamma * T_policy) V = r_policy.
Eigen::VectorXd solve_policy_values(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                    int channel) {
    const int n = mdp.num_states;
    Eigen::MatrixXd coeff = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd immediate(n);
    for (int s = 0; s < n; ++s) {
        const auto u = static_cast<std::size_t>(policy[static_cast<std::size_t>(s)]);
        coeff.row(s) -= mdp.gamma * mdp.transitions[u].row(s);
        immediate(s) =
            mdp.transitions[u].row(s).dot(mdp.costs[static_cast<std::size_t>(channel)][u].row(s));
    }
    return coeff.partialPivLu().solve(immediate);
}

PolicyEvaluation evaluate_policy_unchecked(const TabularMdp& mdp,
                                           const DeterministicPolicy& policy) {
    PolicyEvaluation eval;
    eval.values.reserve(static_cast<std::size_t>(mdp.num_constraints) + 1);
    for (int channel = 0; channel <= mdp.num_constraints; ++channel) {
        eval.values.push_back(solve_policy_values(mdp, policy, channel));
    }
    return eval;
}

int met_count_unchecked(const TabularMdp& mdp, const PolicyEvaluation& eval, int state,
                        double tol) {
    int v = 0;
    while (v < mdp.num_constraints &&
           eval.values[static_cast<std::size_t>(v + 1)](state) <=
               mdp.thresholds[static_cast<std::size_t>(v)] + tol) {
        ++v;
    }
    return v;
}

// Three-case comparison at one state given cached met counts; +1 means the
// left policy is strictly better.
int state_compare(const TabularMdp& mdp, const PolicyEvaluation& lhs, int met_lhs,
                  const PolicyEvaluation& rhs, int met_rhs, int state, double tol) {
    if (met_lhs != met_rhs) {
        return met_lhs > met_rhs ? 1 : -1;
    }
    const int channel = met_lhs == mdp.num_constraints ? 0 : met_lhs + 1;
    const double a = lhs.values[static_cast<std::size_t>(channel)](state);
    const double b = rhs.values[static_cast<std::size_t>(channel)](state);
    if (a < b - tol) {
        return 1;
    }
    if (b < a - tol) {
        return -1;
    }
    return 0;
}

bool per_state_feasible(const TabularMdp& mdp, const PolicyEvaluation& eval, double tol) {
    for (int c = 1; c <= mdp.num_constraints; ++c) {
        const Eigen::VectorXd& values = eval.values[static_cast<std::size_t>(c)];
        const double bound = mdp.thresholds[static_cast<std::size_t>(c - 1)] + tol;
        for (int s = 0; s < mdp.num_states; ++s) {
            if (values(s) > bound) {
                return false;
            }
        }
    }
    return true;
}

// Odometer increment in encoding order: state 0 is the most significant
// digit, so the last state advances fastest.
bool next_policy(DeterministicPolicy& policy, int num_actions) {
    for (std::size_t i = policy.size(); i-- > 0;) {
        if (++policy[i] < num_actions) {
            return true;
        }
        policy[i] = 0;
    }
    return false;
}

}  // namespace

void TabularMdp::validate() const {
    if (num_states < 1 || num_actions < 1) {
        throw std::invalid_argument("TabularMdp: needs at least one state and one action");
    }
    if (num_constraints < 0) {
        throw std::invalid_argument("TabularMdp: num_constraints must be non-negative");
    }
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("TabularMdp: gamma must lie in (0, 1)");
    }
    if (static_cast<int>(transitions.size()) != num_actions) {
        throw std::invalid_argument("TabularMdp: expected one transition matrix per action");
    }
    for (int u = 0; u < num_actions; ++u) {
        const Eigen::MatrixXd& t = transitions[static_cast<std::size_t>(u)];
        if (t.rows() != num_states || t.cols() != num_states) {
            throw std::invalid_argument("TabularMdp: transition matrix for action " +
                                        std::to_string(u) + " has the wrong shape");
        }
        for (int s = 0; s < num_states; ++s) {
            double row_sum = 0.0;
            for (int s2 = 0; s2 < num_states; ++s2) {
                const double p = t(s, s2);
                if (!std::isfinite(p) || p < 0.0) {
                    throw std::invalid_argument("TabularMdp: negative or non-finite "
                                                "transition probability");
                }
                row_sum += p;
            }
            if (std::abs(row_sum - 1.0) > kStochasticTolerance) {
                throw std::invalid_argument("TabularMdp: row " + std::to_string(s) +
                                            " of transition matrix for action " +
                                            std::to_string(u) + " sums to " +
                                            format_double(row_sum) + ", not 1");
            }
        }
    }
    if (static_cast<int>(costs.size()) != num_constraints + 1) {
        throw std::invalid_argument("TabularMdp: expected one cost table per channel");
    }
    for (int c = 0; c <= num_constraints; ++c) {
        const auto& per_action = costs[static_cast<std::size_t>(c)];
        if (static_cast<int>(per_action.size()) != num_actions) {
            throw std::invalid_argument("TabularMdp: cost tables of channel " +
                                        std::to_string(c) + " must cover every action");
        }
        for (const Eigen::MatrixXd& table : per_action) {
            if (table.rows() != num_states || table.cols() != num_states) {
                throw std::invalid_argument("TabularMdp: cost table has the wrong shape");
            }
            if (!table.allFinite() || (table.array() < 0.0).any()) {
                throw std::invalid_argument("TabularMdp: costs must be finite and >= 0");
            }
        }
    }
    if (static_cast<int>(thresholds.size()) != num_constraints) {
        throw std::invalid_argument("TabularMdp: expected " + std::to_string(num_constraints) +
                                    " thresholds");
    }
    for (double k : thresholds) {
        if (!std::isfinite(k) || k < 0.0) {
            throw std::invalid_argument("TabularMdp: thresholds must be finite and >= 0");
        }
    }
    if (initial.size() != num_states) {
        throw std::invalid_argument("TabularMdp: initial distribution has the wrong length");
    }
    double mass = 0.0;
    for (int s = 0; s < num_states; ++s) {
        if (!std::isfinite(initial(s)) || initial(s) < 0.0) {
            throw std::invalid_argument("TabularMdp: initial distribution entries must be >= 0");
        }
        mass += initial(s);
    }
    if (std::abs(mass - 1.0) > kStochasticTolerance) {
        throw std::invalid_argument("TabularMdp: initial distribution sums to " +
                                    format_double(mass) + ", not 1");
    }
}

void validate_policy(const TabularMdp& mdp, const DeterministicPolicy& policy) {
    if (static_cast<int>(policy.size()) != mdp.num_states) {
        throw std::invalid_argument("policy length does not match the state count");
    }
    for (int action : policy) {
        if (action < 0 || action >= mdp.num_actions) {
            throw std::out_of_range("policy contains an out-of-range action index");
        }
    }
}

Eigen::MatrixXd policy_q_values(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                int channel) {
    mdp.validate();
    validate_policy(mdp, policy);
    check_channel(mdp, channel);

    const Eigen::VectorXd values = solve_policy_values(mdp, policy, channel);
    Eigen::MatrixXd q(mdp.num_states, mdp.num_actions);
    for (int s = 0; s < mdp.num_states; ++s) {
        for (int u = 0; u < mdp.num_actions; ++u) {
            const Eigen::MatrixXd& t = mdp.transitions[static_cast<std::size_t>(u)];
            const Eigen::MatrixXd& cost =
                mdp.costs[static_cast<std::size_t>(channel)][static_cast<std::size_t>(u)];
            q(s, u) = t.row(s).dot(cost.row(s)) + mdp.gamma * t.row(s).dot(values);
        }
    }
    return q;
}

PolicyEvaluation evaluate_policy(const TabularMdp& mdp, const DeterministicPolicy& policy) {
    mdp.validate();
    validate_policy(mdp, policy);
    return evaluate_policy_unchecked(mdp, policy);
}

double expected_cost(const TabularMdp& mdp, const DeterministicPolicy& policy, int channel) {
    mdp.validate();
    validate_policy(mdp, policy);
    check_channel(mdp, channel);
    return mdp.initial.dot(solve_policy_values(mdp, policy, channel));
}

std::vector<double> vectorial_value(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                    int state, int action) {
    mdp.validate();
    validate_policy(mdp, policy);
    check_state(mdp, state);
    if (action < 0 || action >= mdp.num_actions) {
        throw std::out_of_range("vectorial_value: action index out of range");
    }

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(mdp.num_constraints) + 1);
    for (int c = mdp.num_constraints; c >= 1; --c) {
        const Eigen::MatrixXd q = policy_q_values(mdp, policy, c);
        out.push_back(std::max(mdp.thresholds[static_cast<std::size_t>(c - 1)], q(state, action)));
    }
    out.push_back(policy_q_values(mdp, policy, 0)(state, action));
    return out;
}

int met_constraint_count(const TabularMdp& mdp, const PolicyEvaluation& eval, int state,
                         double tol) {
    check_state(mdp, state);
    if (static_cast<int>(eval.values.size()) != mdp.num_constraints + 1) {
        throw std::invalid_argument("met_constraint_count: evaluation has the wrong channel count");
    }
    return met_count_unchecked(mdp, eval, state, tol);
}

LexOrdering lex_compare(const TabularMdp& mdp, const DeterministicPolicy& lhs,
                        const DeterministicPolicy& rhs, int state, double tol) {
    mdp.validate();
    validate_policy(mdp, lhs);
    validate_policy(mdp, rhs);
    check_state(mdp, state);

    const PolicyEvaluation eval_lhs = evaluate_policy_unchecked(mdp, lhs);
    const PolicyEvaluation eval_rhs = evaluate_policy_unchecked(mdp, rhs);
    const int met_lhs = met_count_unchecked(mdp, eval_lhs, state, tol);
    const int met_rhs = met_count_unchecked(mdp, eval_rhs, state, tol);
    const int cmp = state_compare(mdp, eval_lhs, met_lhs, eval_rhs, met_rhs, state, tol);
    if (cmp > 0) {
        return LexOrdering::Better;
    }
    if (cmp < 0) {
        return LexOrdering::Worse;
    }
    return LexOrdering::Equal;
}

FeasibilityClass feasibility_check(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                   double tol) {
    mdp.validate();
    validate_policy(mdp, policy);
    const PolicyEvaluation eval = evaluate_policy_unchecked(mdp, policy);
    if (per_state_feasible(mdp, eval, tol)) {
        return FeasibilityClass::FeasibleFor10;
    }
    for (int c = 1; c <= mdp.num_constraints; ++c) {
        const double averaged = mdp.initial.dot(eval.values[static_cast<std::size_t>(c)]);
        if (averaged > mdp.thresholds[static_cast<std::size_t>(c - 1)] + tol) {
            return FeasibilityClass::Infeasible;
        }
    }
    return FeasibilityClass::FeasibleFor6Only;
}

BruteForceResult brute_force_lex_optimal(const TabularMdp& mdp, std::int64_t budget,
                                         bool collect_undominated, double tol) {
    mdp.validate();
    if (budget < 1) {
        throw std::invalid_argument("brute_force_lex_optimal: budget must be positive");
    }
    std::int64_t total = 1;
    for (int s = 0; s < mdp.num_states; ++s) {
        if (total > budget / mdp.num_actions) {
            throw std::invalid_argument("brute_force_lex_optimal: enumeration budget " +
                                        std::to_string(budget) + " exceeded");
        }
        total *= mdp.num_actions;
    }

    struct Entry {
        DeterministicPolicy policy;
        PolicyEvaluation eval;
        std::vector<int> met;
        bool feasible = false;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(total));

    DeterministicPolicy current(static_cast<std::size_t>(mdp.num_states), 0);
    do {
        Entry entry;
        entry.policy = current;
        entry.eval = evaluate_policy_unchecked(mdp, current);
        entry.met.resize(static_cast<std::size_t>(mdp.num_states));
        for (int s = 0; s < mdp.num_states; ++s) {
            entry.met[static_cast<std::size_t>(s)] = met_count_unchecked(mdp, entry.eval, s, tol);
        }
        entry.feasible = per_state_feasible(mdp, entry.eval, tol);
        entries.push_back(std::move(entry));
    } while (next_policy(current, mdp.num_actions));

    const auto compare_at = [&](const Entry& a, const Entry& b, int s) {
        return state_compare(mdp, a.eval, a.met[static_cast<std::size_t>(s)], b.eval,
                             b.met[static_cast<std::size_t>(s)], s, tol);
    };
    const auto weakly_better_everywhere = [&](const Entry& a, const Entry& b) {
        for (int s = 0; s < mdp.num_states; ++s) {
            if (compare_at(a, b, s) < 0) {
                return false;
            }
        }
        return true;
    };
    const auto strictly_dominates = [&](const Entry& a, const Entry& b) {
        bool strict = false;
        for (int s = 0; s < mdp.num_states; ++s) {
            const int cmp = compare_at(a, b, s);
            if (cmp < 0) {
                return false;
            }
            strict = strict || cmp > 0;
        }
        return strict;
    };

    BruteForceResult result;
    result.policies_searched = total;

    std::ptrdiff_t chosen = -1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        bool strong = true;
        for (std::size_t j = 0; j < entries.size() && strong; ++j) {
            strong = i == j || weakly_better_everywhere(entries[i], entries[j]);
        }
        if (strong) {
            chosen = static_cast<std::ptrdiff_t>(i);
            result.strongly_optimal = true;
            break;
        }
    }

    std::vector<bool> undominated;
    const bool need_undominated = chosen < 0 || collect_undominated;
    if (need_undominated) {
        undominated.assign(entries.size(), true);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            for (std::size_t j = 0; j < entries.size(); ++j) {
                if (i != j && strictly_dominates(entries[j], entries[i])) {
                    undominated[i] = false;
                    break;
                }
            }
        }
    }

    if (chosen < 0) {
        // No policy beats every rival everywhere; fall back to the first
        // undominated one, preferring per-state feasibility.
        for (std::size_t i = 0; i < entries.size() && chosen < 0; ++i) {
            if (undominated[i] && entries[i].feasible) {
                chosen = static_cast<std::ptrdiff_t>(i);
            }
        }
        for (std::size_t i = 0; i < entries.size() && chosen < 0; ++i) {
            if (undominated[i]) {
                chosen = static_cast<std::ptrdiff_t>(i);
            }
        }
    }

    result.policy = entries[static_cast<std::size_t>(chosen)].policy;
    if (collect_undominated) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (undominated[i]) {
                result.undominated.push_back(entries[i].policy);
            }
        }
    }
    return result;
}

namespace {

struct TokenLine {
    int number = 0;
    std::vector<std::string> tokens;
};

std::vector<TokenLine> tokenize_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::vector<TokenLine> lines;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.erase(hash);
        }
        std::istringstream stream(raw);
        TokenLine line;
        line.number = number;
        std::string token;
        while (stream >> token) {
            line.tokens.push_back(token);
        }
        if (!line.tokens.empty()) {
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

struct MdpFileReader {
    std::string name;
    std::vector<TokenLine> lines;
    std::size_t cursor = 0;
    int last_number = 0;

    [[noreturn]] void fail(int line, const std::string& message) const {
        throw ParseError(name + ":" + std::to_string(line) + ": " + message);
    }

    const TokenLine& expect_line(const std::string& what) {
        if (cursor >= lines.size()) {
            const int last = lines.empty() ? 0 : lines.back().number;
            fail(last, "unexpected end of file, expected " + what);
        }
        last_number = lines[cursor].number;
        return lines[cursor++];
    }

    double keyword_number(const std::string& keyword) {
        const TokenLine& line = expect_line("'" + keyword + "'");
        if (line.tokens[0] != keyword || line.tokens.size() != 2) {
            fail(line.number, "expected '" + keyword + " <value>'");
        }
        try {
            return parse_double(line.tokens[1], keyword);
        } catch (const std::invalid_argument& e) {
            fail(line.number, e.what());
        }
    }

    int keyword_int(const std::string& keyword) {
        const TokenLine& line = expect_line("'" + keyword + "'");
        if (line.tokens[0] != keyword || line.tokens.size() != 2) {
            fail(line.number, "expected '" + keyword + " <value>'");
        }
        try {
            return static_cast<int>(parse_int(line.tokens[1], keyword));
        } catch (const std::invalid_argument& e) {
            fail(line.number, e.what());
        }
    }

    std::vector<double> row_of(int count, const std::string& what) {
        const TokenLine& line = expect_line(what);
        if (static_cast<int>(line.tokens.size()) != count) {
            fail(line.number, what + " needs " + std::to_string(count) + " values, got " +
                                  std::to_string(line.tokens.size()));
        }
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(count));
        for (const std::string& token : line.tokens) {
            try {
                values.push_back(parse_double(token, what));
            } catch (const std::invalid_argument& e) {
                fail(line.number, e.what());
            }
        }
        return values;
    }
};

int as_index(const MdpFileReader& reader, int line, const std::string& token, int bound,
             const std::string& what) {
    long long value = 0;
    try {
        value = parse_int(token, what);
    } catch (const std::invalid_argument& e) {
        reader.fail(line, e.what());
    }
    if (value < 0 || value >= bound) {
        reader.fail(line, what + " " + token + " outside [0, " + std::to_string(bound) + ")");
    }
    return static_cast<int>(value);
}

}  // namespace

TabularMdp load_tabular_mdp(const std::filesystem::path& path) {
    MdpFileReader reader{path.filename().string(), tokenize_file(path)};

    TabularMdp mdp;
    mdp.num_states = reader.keyword_int("states");
    mdp.num_actions = reader.keyword_int("actions");
    mdp.num_constraints = reader.keyword_int("constraints");
    if (mdp.num_states < 1 || mdp.num_actions < 1 || mdp.num_constraints < 0) {
        reader.fail(reader.last_number, "dimensions must be positive (constraints may be 0)");
    }
    mdp.gamma = reader.keyword_number("gamma");

    if (mdp.num_constraints > 0) {
        const TokenLine& line = reader.expect_line("'thresholds'");
        if (line.tokens[0] != "thresholds" ||
            static_cast<int>(line.tokens.size()) != mdp.num_constraints + 1) {
            reader.fail(line.number, "expected 'thresholds' with " +
                                         std::to_string(mdp.num_constraints) + " values");
        }
        for (std::size_t i = 1; i < line.tokens.size(); ++i) {
            try {
                mdp.thresholds.push_back(parse_double(line.tokens[i], "thresholds"));
            } catch (const std::invalid_argument& e) {
                reader.fail(line.number, e.what());
            }
        }
    }

    {
        const TokenLine& line = reader.expect_line("'initial'");
        if (line.tokens[0] != "initial" ||
            static_cast<int>(line.tokens.size()) != mdp.num_states + 1) {
            reader.fail(line.number,
                        "expected 'initial' with " + std::to_string(mdp.num_states) + " values");
        }
        mdp.initial.resize(mdp.num_states);
        for (int s = 0; s < mdp.num_states; ++s) {
            try {
                mdp.initial(s) = parse_double(line.tokens[static_cast<std::size_t>(s + 1)],
                                              "initial distribution");
            } catch (const std::invalid_argument& e) {
                reader.fail(line.number, e.what());
            }
        }
    }

    mdp.transitions.assign(static_cast<std::size_t>(mdp.num_actions), Eigen::MatrixXd());
    mdp.costs.assign(static_cast<std::size_t>(mdp.num_constraints) + 1,
                     std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(mdp.num_actions)));

    std::vector<bool> seen_transition(static_cast<std::size_t>(mdp.num_actions), false);
    std::vector<std::vector<bool>> seen_cost(
        static_cast<std::size_t>(mdp.num_constraints) + 1,
        std::vector<bool>(static_cast<std::size_t>(mdp.num_actions), false));

    while (reader.cursor < reader.lines.size()) {
        const TokenLine& header = reader.lines[reader.cursor++];
        if (header.tokens[0] == "transition") {
            if (header.tokens.size() != 2) {
                reader.fail(header.number, "expected 'transition <action>'");
            }
            const int u =
                as_index(reader, header.number, header.tokens[1], mdp.num_actions, "action");
            if (seen_transition[static_cast<std::size_t>(u)]) {
                reader.fail(header.number,
                            "duplicate transition block for action " + std::to_string(u));
            }
            seen_transition[static_cast<std::size_t>(u)] = true;
            Eigen::MatrixXd t(mdp.num_states, mdp.num_states);
            for (int s = 0; s < mdp.num_states; ++s) {
                const int line_number =
                    reader.cursor < reader.lines.size() ? reader.lines[reader.cursor].number : 0;
                const std::vector<double> row =
                    reader.row_of(mdp.num_states, "transition row " + std::to_string(s));
                double sum = 0.0;
                for (int s2 = 0; s2 < mdp.num_states; ++s2) {
                    if (row[static_cast<std::size_t>(s2)] < 0.0) {
                        reader.fail(line_number, "negative transition probability");
                    }
                    t(s, s2) = row[static_cast<std::size_t>(s2)];
                    sum += t(s, s2);
                }
                if (std::abs(sum - 1.0) > kStochasticTolerance) {
                    reader.fail(line_number, "transition row sums to " + format_double(sum) +
                                                 ", must be 1 within 1e-12");
                }
            }
            mdp.transitions[static_cast<std::size_t>(u)] = std::move(t);
        } else if (header.tokens[0] == "cost") {
            if (header.tokens.size() != 3) {
                reader.fail(header.number, "expected 'cost <channel> <action>'");
            }
            const int c = as_index(reader, header.number, header.tokens[1],
                                   mdp.num_constraints + 1, "channel");
            const int u =
                as_index(reader, header.number, header.tokens[2], mdp.num_actions, "action");
            if (seen_cost[static_cast<std::size_t>(c)][static_cast<std::size_t>(u)]) {
                reader.fail(header.number, "duplicate cost block for channel " +
                                               std::to_string(c) + ", action " +
                                               std::to_string(u));
            }
            seen_cost[static_cast<std::size_t>(c)][static_cast<std::size_t>(u)] = true;
            Eigen::MatrixXd table(mdp.num_states, mdp.num_states);
            for (int s = 0; s < mdp.num_states; ++s) {
                const std::vector<double> row =
                    reader.row_of(mdp.num_states, "cost row " + std::to_string(s));
                for (int s2 = 0; s2 < mdp.num_states; ++s2) {
                    table(s, s2) = row[static_cast<std::size_t>(s2)];
                }
            }
            mdp.costs[static_cast<std::size_t>(c)][static_cast<std::size_t>(u)] =
                std::move(table);
        } else {
            reader.fail(header.number, "unknown block '" + header.tokens[0] +
                                           "', expected 'transition' or 'cost'");
        }
    }

    const int last_line = reader.lines.empty() ? 0 : reader.lines.back().number;
    for (int u = 0; u < mdp.num_actions; ++u) {
        if (!seen_transition[static_cast<std::size_t>(u)]) {
            reader.fail(last_line, "missing transition block for action " + std::to_string(u));
        }
    }
    for (int c = 0; c <= mdp.num_constraints; ++c) {
        for (int u = 0; u < mdp.num_actions; ++u) {
            if (!seen_cost[static_cast<std::size_t>(c)][static_cast<std::size_t>(u)]) {
                reader.fail(last_line, "missing cost block for channel " + std::to_string(c) +
                                           ", action " + std::to_string(u));
            }
        }
    }

    try {
        mdp.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(reader.name + ": " + e.what());
    }
    return mdp;
}

}  // namespace lexrl
