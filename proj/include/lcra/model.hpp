#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcra/config.hpp"
#include "lcra/design.hpp"
#include "lcra/rng.hpp"
#include "lcra/types.hpp"

namespace lcra::model {

// Per-layer spreading signatures, one N x M matrix per layer, entries
// iid CN(0, 1/N) so columns have unit expected norm.
struct SpreadingEnsemble {
  std::vector<CMatrix> layer_codes;
};

SpreadingEnsemble gen_spreading(const SystemConfig& cfg, RandomStream& rng);

// One uplink slot: activity, effective symbol matrices (power absorbed into
// the symbols), additive noise and the superimposed receive matrix.
// received == sum_q layer_codes[q] * symbols[q] + noise up to rounding.
struct SlotRealization {
  std::vector<std::vector<std::uint8_t>> activity;  // Q x M, 0/1
  std::vector<CMatrix> symbols;                     // Q of M x T, zero rows when inactive
  CMatrix noise;                                    // N x T
  CMatrix received;                                 // N x T
};

SlotRealization synth_slot(const SystemConfig& cfg, const design::PowerPlan& plan,
                           const SpreadingEnsemble& ens, RandomStream& rng,
                           SymbolModel symbol_model = SymbolModel::gaussian);

// Plain-text dump of a slot (activity vectors plus matrix sizes and entries),
// round-trippable at full precision.
void dump_slot(const SlotRealization& slot, const std::string& path);

}  // namespace lcra::model
