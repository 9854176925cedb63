// File formats: CSV datasets (x_1..x_d,y per row) and JSON for networks,
// instances and witnesses. Reals round-trip exactly.
#pragma once

#include "relu2/core.hpp"
#include "relu2/reduce.hpp"

#include <string>
#include <variant>

namespace relu2::io {

Dataset read_dataset_csv(const std::string& path, bool header = false);
void write_dataset_csv(const Dataset& ds, const std::string& path, bool header = false);

using AnyNet = std::variant<TwoReluNet, KReluNet>;

void write_net_json(const TwoReluNet& net, const std::string& path);
void write_net_json(const KReluNet& net, const std::string& path);
AnyNet read_net_json(const std::string& path);

reduce::SeparabilityInstance read_instance_json(const std::string& path);
void write_instance_json(const reduce::SeparabilityInstance& inst, const std::string& path);

reduce::HardSortWitness read_hardsort_json(const std::string& path);
void write_hardsort_json(const reduce::HardSortWitness& w, const std::string& path);

reduce::TwoPlaneWitness read_plane_witness_json(const std::string& path);
void write_plane_witness_json(const reduce::TwoPlaneWitness& w, const std::string& path);

// FNV-1a over the file bytes, as a hex string.
std::string file_digest_hex(const std::string& path);

}  // namespace relu2::io
