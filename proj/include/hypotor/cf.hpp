#pragma once

#include "hypotor/exact.hpp"

#include <vector>

namespace hypotor {

struct Convergent {
    Int p;
    Int q;  // > 0
};

struct ConvergentRun {
    std::vector<Convergent> items;
    bool exact_terminated = false;  // x rational and fully expanded
    bool truncated = false;         // enclosure could not certify the next quotient
    std::string note;
};

/// First `count` continued-fraction convergents of x. Rational x terminates at
/// x itself; for irrational x each partial quotient is certified from refined
/// enclosures. When certification runs out (liouville symbols past their
/// deepening cap) the certified prefix is returned with truncated=true.
ConvergentRun convergents(const ExactReal& x, int count);

}  // namespace hypotor
