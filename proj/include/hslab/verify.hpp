#ifndef HSLAB_VERIFY_HPP
#define HSLAB_VERIFY_HPP

#include <string>
#include <vector>

#include "hslab/path_engine.hpp"
#include "hslab/terms.hpp"

namespace hslab {

enum class IdentityId {
    HS_BASE,
    HS_GENERAL,
    HS_CONDITIONAL,
    HARDY_NORM,
    COND_HARDY_NORM,
    LP_SQUARE,
    MARTINGALE_ISO,
    LOCALTIME_CHAR,
    P1_EXAMPLE
};

std::string identity_name(IdentityId id);
IdentityId identity_from_name(const std::string& name);

enum class Pathway { Quad, Mc, Both };

struct TermValue {
    std::string name;
    std::string pathway;  // "quad" | "mc" | "exact"
    double value = 0.0;
    double uncertainty = 0.0;
};

struct Comparison {
    std::string name;
    double a = 0.0, b = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct IdentityReport {
    std::string entry_id;
    IdentityId id = IdentityId::HS_BASE;
    std::vector<TermValue> terms;
    std::vector<Comparison> checks;
    double lhs_total = 0.0, rhs_total = 0.0;
    double lhs_uncertainty = 0.0, rhs_uncertainty = 0.0;
    bool pass = false;
    double margin = 0.0;  // threshold - |lhs-rhs| of the headline comparison
    uint64_t seed = 0;
    std::string config_hash;
    std::string notes;
};

struct VerifyOptions {
    Pathway pathway = Pathway::Both;
    double k_sigma = 3.0;
    double rel_tol_limit = 0.02;  // exhaustion-limit comparisons
    TermOptions quad;
    PathConfig paths;
};

// base identity: exit integral of phi(u) against phi(u(x)) + half the
// curvature-weighted Green potential of the energy measure + jump + killing
IdentityReport verify_hardy_stein(const OperatorModel& model, const DomainGeometry& D,
                                  const DomainGeometry& U, const Point& x,
                                  const HarmonicFunction& u, const ConvexSpec& spec,
                                  const VerifyOptions& opts);

// p = 2 closure (martingale isometry): E u(X_tau)^2 - u(x)^2 equals the Green
// potential of the full energy measure
IdentityReport verify_martingale_isometry(const OperatorModel& model, const DomainGeometry& D,
                                          const DomainGeometry& U, const Point& x,
                                          const HarmonicFunction& u, const VerifyOptions& opts);

// general convex phi on the 1-d diffusion: curvature atoms enter through
// expected local times (Tanaka estimates + the potential characterization)
IdentityReport verify_general_convex(const OperatorModel& model, const DomainGeometry& D,
                                     const DomainGeometry& U, const Point& x,
                                     const HarmonicFunction& u, const ConvexSpec& spec,
                                     const VerifyOptions& opts);

// conditional identity for ratios u/h with the h-weighted bookkeeping kept
// unscaled (no division by h(x))
IdentityReport verify_conditional(const OperatorModel& model, const DomainGeometry& D,
                                  const DomainGeometry& U, const Point& x,
                                  const HarmonicFunction& u, const HarmonicFunction& h,
                                  const ConvexSpec& spec, const VerifyOptions& opts);

// level-a local-time potential: quadrature characterization against the
// Tanaka Monte Carlo estimate (diffusion) or standalone (jump models)
IdentityReport verify_localtime_characterization(const OperatorModel& model,
                                                 const DomainGeometry& U, const Point& x,
                                                 const HarmonicFunction& u, double level,
                                                 const VerifyOptions& opts);

struct ExhaustionSpec {
    int levels = 5;
    double first_margin = 0.5;  // relative shrink of the first level
    double decay = 8.0;         // margin shrink factor per level
    DomainGeometry level_domain(const DomainGeometry& D, int n) const;
};

// Hardy-norm characterization: sup over the exhaustion of exit integrals
// against the D-kernel right-hand side
IdentityReport hardy_norm(const OperatorModel& model, const DomainGeometry& D, const Point& x,
                          const HarmonicFunction& u, const ConvexSpec& spec,
                          const ExhaustionSpec& ex, const VerifyOptions& opts);

IdentityReport conditional_hardy_norm(const OperatorModel& model, const DomainGeometry& D,
                                      const Point& x, const HarmonicFunction& u,
                                      const HarmonicFunction& h, const ConvexSpec& spec,
                                      const ExhaustionSpec& ex, const VerifyOptions& opts);

// p = 1 Hardy norm of a pure-jump model at a zero of u: the norm collapses
// to the Green potential of the absolute-value jump divergence
IdentityReport p1_example(const OperatorModel& model, const DomainGeometry& D, const Point& x,
                          const HarmonicFunction& u, const ExhaustionSpec& ex,
                          const VerifyOptions& opts);

struct SquareFunctionResult {
    double value = 0.0;        // q_u(x) (or the conditional variant)
    double value_squared = 0.0;
    double uncertainty = 0.0;  // on the squared value
    QuadratureResult local_part, jump_part, killing_part;
};
SquareFunctionResult square_function(const OperatorModel& model, const DomainGeometry& D,
                                     const Point& x, const HarmonicFunction& u,
                                     const HarmonicFunction* h, const VerifyOptions& opts);

struct LpCheckRow {
    std::string label;
    double p = 2.0;
    double q_value = 0.0;
    double norm = 0.0;
    double ratio = 0.0;
    bool finite = false;
};
// Littlewood-Paley bound: the square function against the Hardy norm; the
// frozen admissible constant is 1 (exact at the p = 2 isometry case)
double lp_frozen_constant(double p);
LpCheckRow lp_estimate_check(const OperatorModel& model, const DomainGeometry& D, const Point& x,
                             const HarmonicFunction& u, double p, const HarmonicFunction* h,
                             const VerifyOptions& opts);

}  // namespace hslab

#endif
