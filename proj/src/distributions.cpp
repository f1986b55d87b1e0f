#include "lowbias/distributions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lowbias {

Distribution::Distribution(Kind kind, double a, double b, std::string label)
    : kind_(kind), a_(a), b_(b), label_(std::move(label)) {}

Distribution Distribution::normal(double mean, double variance) {
    if (variance <= 0) throw std::invalid_argument("normal variance must be positive");
    std::ostringstream os;
    os << "normal(" << mean << "," << variance << ")";
    return Distribution(Kind::Normal, mean, variance, os.str());
}

Distribution Distribution::exponential(double rate) {
    if (rate <= 0) throw std::invalid_argument("exponential rate must be positive");
    std::ostringstream os;
    os << "exp(" << rate << ")";
    return Distribution(Kind::Exponential, rate, 0, os.str());
}

Distribution Distribution::gamma_shape(double shape) {
    if (shape <= 0) throw std::invalid_argument("gamma shape must be positive");
    std::ostringstream os;
    os << "gamma(" << shape << ")";
    return Distribution(Kind::Gamma, shape, 0, os.str());
}

Distribution Distribution::uniform01() {
    return Distribution(Kind::Uniform, 0, 1, "uniform(0,1)");
}

Distribution Distribution::bernoulli(double p) {
    if (!(p > 0 && p < 1)) throw std::invalid_argument("bernoulli p must lie in (0,1)");
    std::ostringstream os;
    os << "bernoulli(" << p << ")";
    return Distribution(Kind::Bernoulli, p, 0, os.str());
}

Distribution Distribution::discrete(DiscreteDistribution d) {
    Distribution out(Kind::Discrete, 0, 0, "discrete");
    out.discrete_ = std::move(d);
    return out;
}

const DiscreteDistribution& Distribution::atoms() const {
    if (!discrete_) throw std::invalid_argument("not a discrete distribution");
    return *discrete_;
}

namespace {

MomentSet from_cumulants(double mean, const std::vector<double>& k, int max_order) {
    // central moments from cumulants kappa_2..kappa_8 (kappa_1 excluded)
    auto kk = [&](int r) { return k[static_cast<size_t>(r - 2)]; };
    std::vector<double> mu = {kk(2), kk(3)};
    if (max_order >= 4) mu.push_back(kk(4) + 3 * kk(2) * kk(2));
    if (max_order >= 5) mu.push_back(kk(5) + 10 * kk(3) * kk(2));
    if (max_order >= 6)
        mu.push_back(kk(6) + 15 * kk(4) * kk(2) + 10 * kk(3) * kk(3) + 15 * std::pow(kk(2), 3));
    if (max_order >= 7)
        mu.push_back(kk(7) + 21 * kk(5) * kk(2) + 35 * kk(4) * kk(3) +
                     105 * kk(3) * kk(2) * kk(2));
    if (max_order >= 8)
        mu.push_back(kk(8) + 28 * kk(6) * kk(2) + 56 * kk(5) * kk(3) + 35 * kk(4) * kk(4) +
                     210 * kk(4) * kk(2) * kk(2) + 280 * kk(3) * kk(3) * kk(2) +
                     105 * std::pow(kk(2), 4));
    mu.resize(static_cast<size_t>(max_order - 1));
    return MomentSet(mean, std::move(mu));
}

}  // namespace

MomentSet Distribution::moments(int max_order) const {
    if (max_order < 2 || max_order > 8)
        throw std::invalid_argument("analytic moments available for orders 2..8");
    switch (kind_) {
        case Kind::Normal: {
            double v = b_;
            std::vector<double> mu = {v, 0, 3 * v * v, 0, 15 * std::pow(v, 3), 0,
                                      105 * std::pow(v, 4)};
            mu.resize(static_cast<size_t>(max_order - 1));
            return MomentSet(a_, std::move(mu));
        }
        case Kind::Exponential: {
            // central moments are the rencontres numbers over rate^r
            static const double d[] = {1, 2, 9, 44, 265, 1854, 14833};
            std::vector<double> mu;
            for (int r = 2; r <= max_order; ++r)
                mu.push_back(d[r - 2] / std::pow(a_, r));
            return MomentSet(1.0 / a_, std::move(mu));
        }
        case Kind::Gamma: {
            std::vector<double> kappa;
            double fact = 1.0;
            for (int r = 2; r <= 8; ++r) {
                fact *= (r - 1);
                kappa.push_back(a_ * fact);
            }
            return from_cumulants(a_, kappa, max_order);
        }
        case Kind::Uniform: {
            std::vector<double> mu;
            for (int r = 2; r <= max_order; ++r)
                mu.push_back(r % 2 == 1 ? 0.0
                                        : 1.0 / (std::pow(4.0, r / 2) * (r + 1)));
            return MomentSet(0.5, std::move(mu));
        }
        case Kind::Bernoulli: {
            double p = a_, q = 1 - a_;
            std::vector<double> mu;
            for (int r = 2; r <= max_order; ++r)
                mu.push_back(q * std::pow(-p, r) + p * std::pow(q, r));
            return MomentSet(p, std::move(mu));
        }
        case Kind::Discrete:
            return discrete_->moments(max_order);
    }
    throw std::logic_error("unreachable");
}

double Distribution::draw(Rng& rng) const {
    switch (kind_) {
        case Kind::Normal:
            return a_ + std::sqrt(b_) * rng.normal();
        case Kind::Exponential:
            return rng.exponential() / a_;
        case Kind::Gamma:
            return rng.gamma(a_);
        case Kind::Uniform:
            return rng.uniform();
        case Kind::Bernoulli:
            return rng.uniform() < a_ ? 1.0 : 0.0;
        case Kind::Discrete: {
            double u = rng.uniform();
            double acc = 0.0;
            int last = discrete_->count() - 1;
            for (int i = 0; i < last; ++i) {
                acc += discrete_->probs[i];
                if (u < acc) return discrete_->atoms(i, 0);
            }
            return discrete_->atoms(last, 0);
        }
    }
    throw std::logic_error("unreachable");
}

Distribution Distribution::parse(const std::string& spec) {
    std::string name = spec;
    std::string args;
    if (auto pos = spec.find(':'); pos != std::string::npos) {
        name = spec.substr(0, pos);
        args = spec.substr(pos + 1);
    }
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::istringstream ss(s);
        std::string part;
        while (std::getline(ss, part, sep)) parts.push_back(part);
        return parts;
    };
    if (name == "normal" || name == "norm") {
        auto parts = split(args, ',');
        if (parts.size() != 2) throw std::invalid_argument("normal spec: normal:<mean>,<variance>");
        return normal(std::stod(parts[0]), std::stod(parts[1]));
    }
    if (name == "exp" || name == "exponential")
        return exponential(args.empty() ? 1.0 : std::stod(args));
    if (name == "gamma") return gamma_shape(std::stod(args));
    if (name == "uniform") return uniform01();
    if (name == "bernoulli") return bernoulli(std::stod(args));
    if (name == "discrete") {
        auto parts = split(args, ',');
        std::vector<double> atoms, probs;
        for (const std::string& part : parts) {
            auto kv = split(part, ':');
            if (kv.size() != 2)
                throw std::invalid_argument("discrete spec: discrete:<x>:<p>,<x>:<p>,...");
            atoms.push_back(std::stod(kv[0]));
            probs.push_back(std::stod(kv[1]));
        }
        return discrete(DiscreteDistribution::univariate(std::move(atoms), std::move(probs)));
    }
    throw std::invalid_argument("unknown distribution spec: " + spec);
}

}  // namespace lowbias
