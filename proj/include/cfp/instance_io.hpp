#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfp/flowprob.hpp"

namespace cfp {

struct InstanceMetadata {
  std::optional<std::uint64_t> seed;
  std::optional<double> density;
  std::string calibration;  // "feasible", "relay-infeasible", "infeasible" or empty
  std::vector<CalibrationStep> trace;

  friend bool operator==(const InstanceMetadata&, const InstanceMetadata&) = default;
};

struct InstanceFile {
  FlowInstance instance;
  InstanceMetadata metadata;

  friend bool operator==(const InstanceFile&, const InstanceFile&) = default;
};

// JSON: {nodes, edges: [{from, to, capacity}], nodal_capacities, source, sink,
// injection, metadata?}. Node ids are 0-based. Throws ParseError, and
// InvalidInstance for well-formed documents describing a bad instance.
InstanceFile parse_instance(const std::string& text);
InstanceFile read_instance(const std::string& path);

std::string format_instance(const InstanceFile& file);
void write_instance(const std::string& path, const InstanceFile& file);

// Shortest decimal that reads back to the same double; "inf", "-inf", "nan".
std::string format_double(double x);

}  // namespace cfp
