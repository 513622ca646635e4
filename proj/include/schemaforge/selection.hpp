#pragma once

// Selection configuration shared by the bitstring and tree engines.

namespace schemaforge {

struct TournamentSpec {
    unsigned size = 2;  // contenders sampled per tournament, >= 2
    double bias = 1.0;  // probability each pairing resolves toward the fitter, in [0.5, 1]
};

struct SelectionSpec {
    enum class Kind { Proportional, Tournament } kind = Kind::Proportional;
    TournamentSpec tournament;
};

}  // namespace schemaforge
