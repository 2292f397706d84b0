#pragma once

#include <boost/rational.hpp>
#include <compare>
#include <cstdint>
#include <string>

namespace xswap {

// Simulation time in integer ticks. Delta and epsilon are tick durations.
using Tick = std::int64_t;

// Parties are numbered 1..n; 0 is invalid. The numeric order is the
// canonical leader-numbering order.
struct PartyId {
    std::uint32_t index = 0;

    constexpr bool valid() const { return index != 0; }
    constexpr auto operator<=>(const PartyId&) const = default;
};

using Rat = boost::rational<long long>;

// Payoff value extended with -infinity (the exception value used by the
// Herlihy payoff model).
struct Payoff {
    bool neg_inf = false;
    Rat value{0};

    static Payoff minus_infinity() { return Payoff{true, Rat{0}}; }

    Payoff& operator+=(const Payoff& o) {
        neg_inf = neg_inf || o.neg_inf;
        if (!neg_inf) value += o.value;
        return *this;
    }
    friend Payoff operator+(Payoff a, const Payoff& b) { return a += b; }

    friend bool operator==(const Payoff& a, const Payoff& b) {
        if (a.neg_inf || b.neg_inf) return a.neg_inf == b.neg_inf;
        return a.value == b.value;
    }
    friend bool operator<(const Payoff& a, const Payoff& b) {
        if (a.neg_inf) return !b.neg_inf;
        if (b.neg_inf) return false;
        return a.value < b.value;
    }
    friend bool operator>(const Payoff& a, const Payoff& b) { return b < a; }
    friend bool operator<=(const Payoff& a, const Payoff& b) { return !(b < a); }

    std::string str() const;
};

std::string rat_str(const Rat& r);
Rat parse_rat(const std::string& s);

}  // namespace xswap
