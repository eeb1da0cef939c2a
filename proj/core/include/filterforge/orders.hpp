#pragma once

#include "filterforge/fff.hpp"
#include "filterforge/pauli.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace filterforge {

/// An order that is either resolved or only known to be >= value.
struct Order {
  int value = 0;
  bool lower_bound = false;

  static Order exact(int v) { return {v, false}; }
  static Order at_least(int v) { return {v, true}; }

  bool resolved() const { return !lower_bound; }
  std::string str() const;
  nlohmann::json to_json() const;

  friend bool operator==(const Order&, const Order&) = default;
};

/// Minimum under the sentinel rule: ">= c" beats any resolved value >= c.
Order min(const Order& a, const Order& b);
Order operator+(const Order& o, int shift);

struct OrderCaps {
  int alpha_max = 7;
  int degree_cap = 12;
};

struct RelevantTuple {
  IndexTuple index;
  PauliString product;
};

struct RelevantSet {
  int alpha = 0;
  std::vector<RelevantTuple> tuples;
};

/// Tuples over u in error_axes, v in {x,y,z} whose Pauli product is not the identity.
RelevantSet relevant_indices(int alpha, const std::vector<PauliAxis>& error_axes);

/// Same, dropping tuples that use an identically zero control-matrix entry.
RelevantSet relevant_indices(int alpha, const ControlMatrix& cm,
                             const std::vector<PauliAxis>& error_axes);

/// Smallest |k| with a nonvanishing moment, searched level by level.
Order fff_filtering_order(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap);

/// Smallest |k| with a nonvanishing gff_taylor coefficient.
Order gff_filtering_order(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap);

/// phi^[kappa] over relevant tuples of order <= kappa.
Order protocol_fo(const ControlMatrix& cm, int kappa, const std::vector<PauliAxis>& error_axes,
                  int degree_cap);

/// Phi^[kappa] from generalized filter tables.
Order protocol_generalized_fo(const ControlMatrix& cm, int kappa,
                              const std::vector<PauliAxis>& error_axes, int degree_cap);

/// delta = min over relevant tuples of alpha + phi - 1.
Order protocol_co(const ControlMatrix& cm, const std::vector<PauliAxis>& error_axes,
                  int alpha_max, int degree_cap);

struct NoGoResult {
  bool pass = true;
  int first_alpha = 0;  // set when pass is false
};

/// Fails at the first alpha with a relevant nonzero zero-frequency moment.
NoGoResult quasistatic_no_go(const ControlMatrix& cm, const std::vector<PauliAxis>& error_axes,
                             int alpha_max);

struct IndexOrders {
  IndexTuple index;
  PauliString product;
  Order phi;
  Order delta;
};

struct ProtocolOrders {
  std::string protocol;
  std::vector<PauliAxis> error_axes;
  OrderCaps caps;
  std::vector<IndexOrders> per_index;
  std::map<int, Order> fo_by_level;
  Order co;
  bool resolved = false;

  nlohmann::json to_json() const;
};

/// Full report: per-index orders, phi^[kappa] for kappa = 1..alpha_max, and delta.
/// Per-index searches run in parallel; output order is deterministic.
ProtocolOrders analyze_orders(const ControlMatrix& cm, const OrderCaps& caps = {});

}  // namespace filterforge
