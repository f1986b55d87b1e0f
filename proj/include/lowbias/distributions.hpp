#pragma once

#include <optional>
#include <string>

#include "lowbias/discrete.hpp"
#include "lowbias/moments.hpp"
#include "lowbias/rng.hpp"

namespace lowbias {

/// Sampling distribution with analytic central moments to order 8 where
/// defined. Specs: normal:<mean>,<variance>, exp:<rate>, gamma:<shape>,
/// uniform, bernoulli:<p>, discrete:<x>:<p>,<x>:<p>,...
class Distribution {
public:
    enum class Kind { Normal, Exponential, Gamma, Uniform, Bernoulli, Discrete };

    static Distribution normal(double mean, double variance);
    static Distribution exponential(double rate);
    static Distribution gamma_shape(double shape);
    static Distribution uniform01();
    static Distribution bernoulli(double p);
    static Distribution discrete(DiscreteDistribution d);
    static Distribution parse(const std::string& spec);

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    MomentSet moments(int max_order) const;
    double draw(Rng& rng) const;
    const DiscreteDistribution& atoms() const;
    // finite view where one exists (Discrete and Bernoulli kinds)
    DiscreteDistribution to_discrete() const;

private:
    Distribution(Kind kind, double a, double b, std::string label);

    Kind kind_;
    double a_ = 0, b_ = 0;
    std::optional<DiscreteDistribution> discrete_;
    std::string label_;
};

}  // namespace lowbias
