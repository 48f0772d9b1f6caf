#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "curvedraw/curve_model.hpp"

namespace curvedraw {

// Multiview Local consistency Network: sample-level links between curve
// pairs, weighted by the number of views in which the two samples share a
// supporting 2D edgel. Curves are addressed by their index in the input
// vector; pair keys are canonical (i < j) with (s, t) ordered accordingly.
struct MLN {
  std::map<std::pair<int, int>,
           std::map<std::pair<int, int>, int>> pair_links;

  // Symmetric accessor: weight(i,j,s,t) == weight(j,i,t,s).
  int weight(int i, int j, int s, int t) const;
  const std::map<std::pair<int, int>, int>* links_between(int i, int j) const;
  std::size_t total_links() const;
};

// Curve-level network: pairs with at least tau_sl strong local links
// (MLN weight >= tau_eps), plus the connected-component clustering.
struct MCCN {
  std::set<std::pair<int, int>> links;
  std::map<std::pair<int, int>, int> strong_counts;
  std::vector<std::vector<int>> clusters;  // sorted curve indices
  std::vector<int> cluster_of;             // curve index -> cluster id

  bool linked(int i, int j) const;
};

// Vote accumulation over shared supporting edgels, sharded by view with
// commutative merges; the result is schedule-independent.
MLN build_mln(const std::vector<Curve3D>& curves);

// Serial reference of build_mln, kept for testing the sharded kernel.
MLN build_mln_serial(const std::vector<Curve3D>& curves);

MCCN build_mccn(const MLN& mln, int n_curves, int tau_eps, int tau_sl);

// Interpolates links across sample-pair holes of length <= g_max whose
// flanks are linked, only inside MCCN-linked curve pairs.
MLN gap_fill(const MLN& mln, const MCCN& mccn, int g_max);

}  // namespace curvedraw
