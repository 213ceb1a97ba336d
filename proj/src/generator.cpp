#include "psea/generator.hpp"

#include <cmath>
#include <stdexcept>

namespace psea {

namespace {

struct Block {
    std::int64_t top;
    std::int64_t value;
    std::int64_t size;  // -1 = infinite
};

// Maximal equal-value blocks of the active region of eta, lowest index first.
std::vector<Block> blocks_of(const WindowSignature& eta, std::int64_t N) {
    std::vector<Block> out;
    std::int64_t lo = eta.lo();
    std::int64_t hi = eta.hi();
    std::int64_t i = lo;
    while (i <= hi) {
        std::int64_t v = eta.value(i).value();
        std::int64_t j = i;
        while (j < hi && eta.value(j + 1) == ExtInt(v)) ++j;
        Block b{i, v, j - i + 1};
        if (j == hi && eta.right_fill == ExtInt(v)) {
            b.size = N == kNInfinity ? -1 : N - i + 1;
            out.push_back(b);
            return out;
        }
        out.push_back(b);
        i = j + 1;
    }
    if (eta.right_fill.is_finite()) {
        Block tail{hi + 1, eta.right_fill.value(), N == kNInfinity ? -1 : N - hi};
        if (tail.size != 0) out.push_back(tail);
    }
    return out;
}

} // namespace

std::int64_t GeneratorMatrix::find_state(const WindowSignature& s) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == s) return (std::int64_t)i;
    return -1;
}

GeneratorMatrix build_Q(const WindowSignature& nu, const WindowSignature& kappa,
                        std::int64_t d, const Rational& t, std::int64_t N) {
    if (!(t > 0 && t < 1)) throw std::domain_error("build_Q: t outside (0,1)");
    WindowSignature lo = truncate_Fd(nu, d);
    WindowSignature hi = truncate_Fd(kappa, d);
    if (!(lo.left_fill == ExtInt(d)))
        throw std::invalid_argument("build_Q: initial state has no coordinate pinned at d");

    GeneratorMatrix G;
    G.t = t;
    G.d = d;
    G.N = N;
    G.states = interval_states(lo, hi);
    std::size_t S = G.states.size();
    G.rates.assign(S, std::vector<Rational>(S + 1, Rational(0)));

    Rational one_minus_t = Rational(1) - t;
    for (std::size_t s = 0; s < S; ++s) {
        const WindowSignature& eta = G.states[s];
        Rational out_total = 0;
        for (const Block& b : blocks_of(eta, N)) {
            if (b.value >= d) continue;  // frozen at the cap
            Rational rate = pow_rat(t, b.top);
            if (b.size < 0)
                rate /= one_minus_t;
            else
                rate *= (Rational(1) - pow_rat(t, b.size)) / one_minus_t;
            WindowSignature target = eta;
            if (b.top > target.hi()) {
                // jump out of the flat tail: extend the window by one entry
                while (target.hi() < b.top - 1) target.window.push_back(target.right_fill);
                target.window.push_back(ExtInt(b.value + 1));
            } else if (b.top <= target.offset) {
                throw std::logic_error("build_Q: block top inside frozen region");
            } else {
                target.window[(std::size_t)(b.top - target.offset - 1)] = ExtInt(b.value + 1);
            }
            target.canonicalize();
            std::int64_t tid = G.find_state(target);
            if (tid >= 0)
                G.rates[s][(std::size_t)tid] += rate;
            else
                G.rates[s][S] += rate;
            out_total += rate;
        }
        // closed form for the total exit rate: all walkers below the cap
        Rational head = pow_rat(t, eta.offset + 1);
        Rational closed;
        if (eta.right_fill.is_finite()) {
            closed = N == kNInfinity ? head / one_minus_t
                                     : (head - pow_rat(t, N + 1)) / one_minus_t;
        } else {
            closed = (head - pow_rat(t, eta.hi() + 1)) / one_minus_t;
        }
        if (out_total != closed) throw std::logic_error("build_Q: rate bookkeeping mismatch");
        G.rates[s][s] = -out_total;
    }
    return G;
}

double transient_prob(const GeneratorMatrix& G, double T, std::int64_t from,
                      std::int64_t to, double eps, std::int64_t* terms_out) {
    if (eps <= 0.0) throw std::domain_error("transient_prob: eps must be positive");
    if (T < 0.0) throw std::domain_error("transient_prob: negative time");
    std::size_t S = G.states.size();
    if (from < 0 || to < 0 || (std::size_t)from >= S || (std::size_t)to >= S)
        throw std::out_of_range("transient_prob: state id out of range");
    if (terms_out) *terms_out = 0;
    double lam = 0.0;
    for (std::size_t s = 0; s < S; ++s)
        lam = std::max(lam, std::abs((double)G.rates[s][s].convert_to<double>()));
    if (lam == 0.0 || T == 0.0) return from == to ? 1.0 : 0.0;

    // uniformized transition matrix over the S states plus the absorbing
    // escape state
    std::size_t E = S + 1;
    std::vector<double> P(E * E, 0.0);
    for (std::size_t i = 0; i < E; ++i) P[i * E + i] = 1.0;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t c = 0; c < E; ++c)
            P[s * E + c] += G.rates[s][c].convert_to<double>() / lam;

    std::vector<double> pi(E, 0.0), nxt(E, 0.0);
    pi[(std::size_t)from] = 1.0;
    double lt = lam * T;
    double weight = std::exp(-lt);
    double cum = weight;
    double result = weight * pi[(std::size_t)to];
    for (std::int64_t k = 1; 1.0 - cum >= eps; ++k) {
        for (std::size_t c = 0; c < E; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < E; ++r) acc += pi[r] * P[r * E + c];
            nxt[c] = acc;
        }
        pi.swap(nxt);
        weight *= lt / (double)k;
        cum += weight;
        result += weight * pi[(std::size_t)to];
        if (terms_out) *terms_out = k;
        if (k > 1000000) throw std::runtime_error("transient_prob: series did not converge");
    }
    return result;
}

double multi_time_prob(const GeneratorMatrix& G, std::int64_t from,
                       const std::vector<double>& times,
                       const std::vector<std::int64_t>& states, double eps) {
    if (times.size() != states.size())
        throw std::invalid_argument("multi_time_prob: times/states length mismatch");
    double prob = 1.0;
    double prev_t = 0.0;
    std::int64_t prev_s = from;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < prev_t) throw std::invalid_argument("multi_time_prob: times must increase");
        prob *= transient_prob(G, times[i] - prev_t, prev_s, states[i], eps);
        prev_t = times[i];
        prev_s = states[i];
    }
    return prob;
}

} // namespace psea
