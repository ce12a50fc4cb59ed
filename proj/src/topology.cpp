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

#include "commstep/topology.hpp"

#include <cmath>
#include <limits>

#include "commstep/error.hpp"
#include "commstep/kvdoc.hpp"

namespace commstep {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

UnitKind parse_unit_kind(const std::string& s) {
  if (s == "gpu") return UnitKind::gpu;
  if (s == "cpu") return UnitKind::cpu;
  throw InvariantError("node.unit_kind", "expected gpu or cpu, got '" + s + "'");
}

FabricKind parse_fabric_kind(const std::string& s) {
  if (s == "full_mesh") return FabricKind::full_mesh;
  if (s == "switched") return FabricKind::switched;
  if (s == "host_pcie") return FabricKind::host_pcie;
  if (s == "split_domains") return FabricKind::split_domains;
  throw InvariantError("fabric.kind", "unknown fabric kind '" + s + "'");
}

int to_int(std::int64_t v, const char* field) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw InvariantError(field, "out of range");
  }
  return static_cast<int>(v);
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw InvariantError(field, what);
}

}  // namespace

std::string_view to_string(UnitKind kind) {
  return kind == UnitKind::gpu ? "gpu" : "cpu";
}

std::string_view to_string(FabricKind kind) {
  switch (kind) {
    case FabricKind::full_mesh: return "full_mesh";
    case FabricKind::switched: return "switched";
    case FabricKind::host_pcie: return "host_pcie";
    case FabricKind::split_domains: return "split_domains";
  }
  return "?";
}

void validate(const Machine& m) {
  require(!m.name.empty(), "machine.name", "must not be empty");
  require(m.max_nodes >= 1, "machine.max_nodes", "must be >= 1");
  const auto& n = m.node;
  require(n.units >= 1, "node.units", "must be >= 1");
  require(std::isfinite(n.unit.mem_gb) && n.unit.mem_gb >= 0.0, "node.unit_mem_gb",
          "must be >= 0");
  require(std::isfinite(n.unit.rel_throughput) && n.unit.rel_throughput > 0.0,
          "node.unit_rel_throughput", "must be > 0");
  require(std::isfinite(n.fabric.per_unit_gbps) && n.fabric.per_unit_gbps > 0.0,
          "fabric.per_unit_gbps", "must be > 0");
  if (n.fabric.kind == FabricKind::split_domains) {
    require(n.fabric.cross_domain_gbps > 0.0, "fabric.cross_domain_gbps",
            "must be > 0 for split_domains");
  } else {
    require(n.fabric.cross_domain_gbps == 0.0, "fabric.cross_domain_gbps",
            "only valid for split_domains");
  }
  require(n.fabric.efficiency > 0.0 && n.fabric.efficiency <= 1.0, "fabric.efficiency",
          "must be in (0, 1]");
  require(n.nic.count >= 1, "nic.count", "must be >= 1");
  require(std::isfinite(n.nic.gbps_each) && n.nic.gbps_each > 0.0, "nic.gbps_each",
          "must be > 0");
  require(n.nic.efficiency > 0.0 && n.nic.efficiency <= 1.0, "nic.efficiency",
          "must be in (0, 1]");
  if (n.host_link_gbps) {
    require(*n.host_link_gbps > 0.0, "node.host_link_gbps", "must be > 0");
  }
}

Machine parse_machine(std::string_view text) {
  const auto doc = parse_kv(text);
  for (const auto& s : doc.sections) {
    if (s.name != "machine" && s.name != "node" && s.name != "fabric" && s.name != "nic") {
      throw ParseError(s.line, "unknown section [" + s.name + "]");
    }
  }

  Machine m;
  {
    SectionReader r(doc.require("machine"));
    m.name = r.text("name");
    m.label = r.optional_text("label").value_or("");
    m.max_nodes = to_int(r.integer("max_nodes"), "machine.max_nodes");
    r.finish();
  }
  {
    SectionReader r(doc.require("node"));
    m.node.units = to_int(r.integer("units"), "node.units");
    m.node.unit.kind = parse_unit_kind(r.text("unit_kind"));
    m.node.unit.model_name = r.text("unit_model");
    m.node.unit.mem_gb = r.number("unit_mem_gb");
    m.node.unit.rel_throughput = r.number("unit_rel_throughput");
    m.node.host_link_gbps = r.optional_number("host_link_gbps");
    r.finish();
  }
  {
    SectionReader r(doc.require("fabric"));
    m.node.fabric.kind = parse_fabric_kind(r.text("kind"));
    m.node.fabric.per_unit_gbps = r.number("per_unit_gbps");
    if (m.node.fabric.kind == FabricKind::split_domains) {
      m.node.fabric.cross_domain_gbps = r.number("cross_domain_gbps");
    }
    m.node.fabric.efficiency = r.optional_number("efficiency").value_or(1.0);
    r.finish();
  }
  {
    SectionReader r(doc.require("nic"));
    m.node.nic.count = to_int(r.integer("count"), "nic.count");
    m.node.nic.gbps_each = r.number("gbps_each");
    m.node.nic.efficiency = r.optional_number("efficiency").value_or(1.0);
    r.finish();
  }
  validate(m);
  return m;
}

std::string serialize_machine(const Machine& m) {
  KvWriter w;
  w.section("machine").put("name", m.name);
  if (!m.label.empty()) w.put("label", m.label);
  w.put("max_nodes", std::int64_t{m.max_nodes});

  w.section("node")
      .put("units", std::int64_t{m.node.units})
      .put("unit_kind", to_string(m.node.unit.kind))
      .put("unit_model", m.node.unit.model_name)
      .put("unit_mem_gb", m.node.unit.mem_gb)
      .put("unit_rel_throughput", m.node.unit.rel_throughput);
  if (m.node.host_link_gbps) w.put("host_link_gbps", *m.node.host_link_gbps);

  w.section("fabric")
      .put("kind", to_string(m.node.fabric.kind))
      .put("per_unit_gbps", m.node.fabric.per_unit_gbps);
  if (m.node.fabric.kind == FabricKind::split_domains) {
    w.put("cross_domain_gbps", m.node.fabric.cross_domain_gbps);
  }
  w.put("efficiency", m.node.fabric.efficiency);

  w.section("nic")
      .put("count", std::int64_t{m.node.nic.count})
      .put("gbps_each", m.node.nic.gbps_each)
      .put("efficiency", m.node.nic.efficiency);
  return w.str();
}

double node_egress_bytes_per_ms(const Machine& m) {
  const auto& nic = m.node.nic;
  return nic.count * nic.gbps_each * nic.efficiency * kGbpsToGBPerMs;
}

double unit_fabric_bytes_per_ms(const Machine& m) {
  if (m.node.units < 2) return kInf;
  return m.node.fabric.per_unit_gbps * m.node.fabric.efficiency * kGbpsToGBPerMs;
}

double cross_domain_bytes_per_ms(const Machine& m) {
  if (m.node.fabric.kind != FabricKind::split_domains) return kInf;
  return m.node.fabric.cross_domain_gbps * m.node.fabric.efficiency * kGbpsToGBPerMs;
}

double host_link_bytes_per_ms(const Machine& m) {
  if (!m.node.host_link_gbps) return kInf;
  return *m.node.host_link_gbps * kGbpsToGBPerMs;
}

int fabric_domain(const Machine& m, int unit) {
  if (m.node.fabric.kind != FabricKind::split_domains) return 0;
  return unit < m.node.units / 2 ? 0 : 1;
}

double nic_gbps_per_unit(const Machine& m) {
  return m.node.nic.count * m.node.nic.gbps_each / m.node.units;
}

Machine build_hypothetical_nvswitch(const Machine& m, int joined_nodes) {
  if (joined_nodes < 1 || joined_nodes > kMaxNvswitchJoin) {
    throw InvariantError("joined_nodes", "must be in [1, " +
                                             std::to_string(kMaxNvswitchJoin) + "], got " +
                                             std::to_string(joined_nodes));
  }
  if (joined_nodes == 1) return m;
  if (m.max_nodes < joined_nodes) {
    throw InvariantError("joined_nodes", "machine has only " + std::to_string(m.max_nodes) +
                                             " nodes");
  }
  Machine out = m;
  out.name = m.name + ":nvswitch=" + std::to_string(joined_nodes);
  out.label.clear();
  out.node.units = m.node.units * joined_nodes;
  out.node.fabric.kind = FabricKind::switched;
  out.node.fabric.cross_domain_gbps = 0.0;
  out.node.nic.count = m.node.nic.count * joined_nodes;
  out.max_nodes = m.max_nodes / joined_nodes;
  return out;
}

Machine with_active_units(const Machine& m, int units) {
  if (units < 1 || units > m.node.units) {
    throw InvariantError("units_per_node", "must be in [1, " + std::to_string(m.node.units) +
                                               "], got " + std::to_string(units));
  }
  Machine out = m;
  out.node.units = units;
  return out;
}

Machine with_efficiencies(const Machine& m, double nic_efficiency, double fabric_efficiency) {
  Machine out = m;
  out.node.nic.efficiency = nic_efficiency;
  out.node.fabric.efficiency = fabric_efficiency;
  validate(out);
  return out;
}

}  // namespace commstep
