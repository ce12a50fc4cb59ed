// Copyright 2026 The commstep Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Machine description: homogeneous nodes of compute units joined by an
// intra-node fabric, with NICs to the network. Bandwidths are stored in Gbps
// and queried in GB/ms (GB = 1e9 bytes, 1 Gbps = 0.125 GB/s).

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace commstep {

inline constexpr double kGbpsToGBPerMs = 0.125 / 1000.0;

enum class UnitKind { gpu, cpu };
enum class FabricKind { full_mesh, switched, host_pcie, split_domains };

std::string_view to_string(UnitKind kind);
std::string_view to_string(FabricKind kind);

struct ComputeUnit {
  UnitKind kind = UnitKind::gpu;
  std::string model_name;
  double mem_gb = 0.0;
  /// Work units per ms relative to one A100.
  double rel_throughput = 1.0;

  bool operator==(const ComputeUnit&) const = default;
};

struct Fabric {
  FabricKind kind = FabricKind::switched;
  /// Aggregate egress per compute unit.
  double per_unit_gbps = 0.0;
  /// Link between the two halves of a split_domains node, shared by both
  /// directions. Zero for every other kind.
  double cross_domain_gbps = 0.0;
  double efficiency = 1.0;

  bool operator==(const Fabric&) const = default;
};

struct Nic {
  int count = 1;
  double gbps_each = 0.0;
  double efficiency = 1.0;

  bool operator==(const Nic&) const = default;
};

struct NodeSpec {
  int units = 1;
  ComputeUnit unit;
  Fabric fabric;
  Nic nic;
  /// Per-unit PCIe link to the host. Only charged when the cost model is asked
  /// to route inter-node traffic through the host.
  std::optional<double> host_link_gbps;

  bool operator==(const NodeSpec&) const = default;
};

struct Machine {
  std::string name;
  /// Free-form system name used to match measurement records.
  std::string label;
  NodeSpec node;
  int max_nodes = 1;

  bool operator==(const Machine&) const = default;
};

/// Throws InvariantError naming the first offending field.
void validate(const Machine& machine);

/// Parses and validates a machine-spec document.
Machine parse_machine(std::string_view text);
std::string serialize_machine(const Machine& machine);

/// NIC capacity of one node in GB/ms, including NIC efficiency.
double node_egress_bytes_per_ms(const Machine& machine);

/// Intra-node egress capacity of one unit in GB/ms, including fabric
/// efficiency. +infinity on single-unit nodes.
double unit_fabric_bytes_per_ms(const Machine& machine);

/// Capacity of the shared link between fabric domains in GB/ms.
/// +infinity unless the fabric is split_domains.
double cross_domain_bytes_per_ms(const Machine& machine);

/// Host link capacity of one unit in GB/ms; +infinity when not described.
double host_link_bytes_per_ms(const Machine& machine);

/// Fabric domain (0 or 1) of a unit. Split nodes put the lower half of the
/// unit indices in domain 0; every other fabric has a single domain.
int fabric_domain(const Machine& machine, int unit);

/// Node NIC bandwidth divided evenly across the node's units.
double nic_gbps_per_unit(const Machine& machine);

/// Joins `joined_nodes` nodes into one switched node at the original per-unit
/// fabric speed. NICs are pooled and max_nodes shrinks accordingly. Joining a
/// single node returns the machine unchanged. Valid range is [1, 32].
Machine build_hypothetical_nvswitch(const Machine& machine, int joined_nodes);

inline constexpr int kMaxNvswitchJoin = 32;

/// Same node with only `units` of its compute units in use. NICs unchanged.
Machine with_active_units(const Machine& machine, int units);

/// Replaces the NIC and fabric efficiencies.
Machine with_efficiencies(const Machine& machine, double nic_efficiency,
                          double fabric_efficiency);

}  // namespace commstep
