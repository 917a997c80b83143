#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plap {

// Summability-exponent arithmetic for the coupled system. Every function is
// a closed-form rational expression in (N, p, r, theta, m), templated so it
// evaluates in double precision or exactly over a rational type (anything
// with +,-,*,/ and comparisons, e.g. boost::rational<long long>).

/// Sobolev conjugate p* = Np/(N-p), for 1 < p < N.
template <class T>
T sobolev_conjugate(T N, T p) {
    if (!(p > T(1))) throw std::invalid_argument("sobolev_conjugate: need p > 1");
    if (!(p < N)) throw std::invalid_argument("sobolev_conjugate: need p < N");
    return N * p / (N - p);
}

/// Holder conjugate q' = q/(q-1), for q > 1.
template <class T>
T dual_exponent(T q) {
    if (!(q > T(1))) throw std::invalid_argument("dual_exponent: need q > 1");
    return q / (q - T(1));
}

/// m1 = Npr / (N(p-1)^2 + p(p-1) + p^2 r); satisfies m1 > (p*)' iff r > p* - 1.
template <class T>
T m1_exponent(T N, T p, T r) {
    if (!(p > T(1) && p < N)) throw std::invalid_argument("m1_exponent: need 1 < p < N");
    if (!(r > T(1))) throw std::invalid_argument("m1_exponent: need r > 1");
    const T pm1 = p - T(1);
    return N * p * r / (N * pm1 * pm1 + p * pm1 + p * p * r);
}

/// m2 = Npr / (N(p-1)^2 + p(p-1) + p^2 r - theta (p-1)(N-p)); m2 = m1 at theta = 0.
template <class T>
T m2_exponent(T N, T p, T r, T theta) {
    if (!(p > T(1) && p < N)) throw std::invalid_argument("m2_exponent: need 1 < p < N");
    if (!(r > T(1))) throw std::invalid_argument("m2_exponent: need r > 1");
    if (!(theta >= T(0) && theta < p - T(1)))
        throw std::invalid_argument("m2_exponent: need 0 <= theta < p - 1");
    const T pm1 = p - T(1);
    return N * p * r / (N * pm1 * pm1 + p * pm1 + p * p * r - theta * pm1 * (N - p));
}

/// s = m(pr + p - 1) / (m(p-1) + 1). In hypothesis (gamma >= 1) iff m >= (r+1)'.
template <class T>
T s_exponent(T m, T p, T r) {
    return m * (p * r + p - T(1)) / (m * (p - T(1)) + T(1));
}

/// gamma = (r(m-1) + m(p-1)) / (m(p-1) + 1); s = r + gamma identically.
template <class T>
T gamma_exponent(T m, T p, T r) {
    return (r * (m - T(1)) + m * (p - T(1))) / (m * (p - T(1)) + T(1));
}

/// t = Nm(p-1)/(N - pm), defined for m < N/p; empty otherwise (bounded-data
/// territory). At m = (p*)' it equals p* exactly.
template <class T>
std::optional<T> t_exponent(T N, T m, T p) {
    if (!(N - p * m > T(0))) return std::nullopt;
    return N * m * (p - T(1)) / (N - p * m);
}

/// The coupling threshold (N(p-1) + p)/(N - p), identically equal to p* - 1.
template <class T>
T r_threshold(T N, T p) {
    if (!(p > T(1) && p < N)) throw std::invalid_argument("r_threshold: need 1 < p < N");
    return (N * (p - T(1)) + p) / (N - p);
}

/// Validated parameter tuple for regime classification.
struct RegimeInput {
    int N;
    double p;
    double r;
    double theta;
    double m;

    RegimeInput(int N_, double p_, double r_, double theta_, double m_)
        : N(N_), p(p_), r(r_), theta(theta_), m(m_) {
        if (N < 2) throw std::invalid_argument("RegimeInput: need N >= 2");
        if (!(p > 1.0 && p < static_cast<double>(N)))
            throw std::invalid_argument("RegimeInput: need 1 < p < N");
        if (!(r > 1.0)) throw std::invalid_argument("RegimeInput: need r > 1");
        if (!(theta >= 0.0 && theta < p - 1.0))
            throw std::invalid_argument("RegimeInput: need 0 <= theta < p - 1");
        if (!(m >= 1.0)) throw std::invalid_argument("RegimeInput: need m >= 1");
    }
};

/// Hierarchy of hypotheses, ordered by strength of the conclusion.
enum class Regime {
    bounded_data,         // m > N/p: bounded saddle-point solution
    dual_data,            // m >= (p*)': finite-energy solution, any theta
    regularizing_theta0,  // theta = 0, (r+1)' <= m < (p*)': coupling-driven finite energy
    conjecture_regime,    // m >= (r+1+theta)' and r > p* - 1 - theta: conditional result
    outside_theory,
};

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::bounded_data: return "bounded_data";
        case Regime::dual_data: return "dual_data";
        case Regime::regularizing_theta0: return "regularizing_theta0";
        case Regime::conjecture_regime: return "conjecture_regime";
        case Regime::outside_theory: return "outside_theory";
    }
    return "?";
}

enum class BestSummability { none, lebesgue_s, lebesgue_t, bounded };

/// Everything the classifier derives from one parameter tuple.
struct RegimeReport {
    RegimeInput input;
    Regime regime;
    std::vector<std::string> satisfied;  // all hypotheses that hold, strongest first

    double pstar;
    double pstar_dual;
    double r1_dual;  // (r+1)'
    double m1;
    double m2;
    double s;
    double gamma;
    std::optional<double> t;  // only for m < N/p
    double r_thresh;

    BestSummability best;
    std::optional<double> best_exponent;  // value of s or t when applicable
};

/// Evaluates every exponent and selects the strongest applicable regime.
/// Total: parameters outside every hypothesis classify as outside_theory.
inline RegimeReport classify(const RegimeInput& in) {
    const double N = in.N;
    RegimeReport rep{in,
                     Regime::outside_theory,
                     {},
                     sobolev_conjugate(N, in.p),
                     0.0,
                     dual_exponent(in.r + 1.0),
                     m1_exponent(N, in.p, in.r),
                     m2_exponent(N, in.p, in.r, in.theta),
                     s_exponent(in.m, in.p, in.r),
                     gamma_exponent(in.m, in.p, in.r),
                     t_exponent(N, in.m, in.p),
                     r_threshold(N, in.p),
                     BestSummability::none,
                     std::nullopt};
    rep.pstar_dual = dual_exponent(rep.pstar);

    const bool bounded = in.m > N / in.p;
    const bool dual = in.m >= rep.pstar_dual;
    const bool reg0 = in.theta == 0.0 && in.m >= rep.r1_dual && in.m < rep.pstar_dual;
    const bool conj = in.m >= dual_exponent(in.r + 1.0 + in.theta) &&
                      in.r > rep.pstar - 1.0 - in.theta;
    if (bounded) rep.satisfied.push_back("m > N/p");
    if (dual) rep.satisfied.push_back("m >= (p*)'");
    if (reg0) rep.satisfied.push_back("theta = 0 and (r+1)' <= m < (p*)'");
    if (conj) rep.satisfied.push_back("m >= (r+1+theta)' and r > p* - 1 - theta");

    if (bounded) rep.regime = Regime::bounded_data;
    else if (dual) rep.regime = Regime::dual_data;
    else if (reg0) rep.regime = Regime::regularizing_theta0;
    else if (conj) rep.regime = Regime::conjecture_regime;

    // L^t needs the dual-data hypothesis besides m >= m1 (above the coupling
    // threshold r > p* - 1 the latter implies the former, below it does not);
    // L^s needs m >= (r+1)'.
    if (in.m >= N / in.p) {
        rep.best = BestSummability::bounded;
    } else if (in.m >= rep.m1 && in.m >= rep.pstar_dual && rep.t) {
        rep.best = BestSummability::lebesgue_t;
        rep.best_exponent = rep.t;
    } else if (in.m >= rep.r1_dual) {
        rep.best = BestSummability::lebesgue_s;
        rep.best_exponent = rep.s;
    }
    return rep;
}

}  // namespace plap
