#include "curvedraw/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "curvedraw/parallel.hpp"

namespace curvedraw {

int MLN::weight(int i, int j, int s, int t) const {
  if (i > j) {
    std::swap(i, j);
    std::swap(s, t);
  }
  const auto pit = pair_links.find({i, j});
  if (pit == pair_links.end()) return 0;
  const auto lit = pit->second.find({s, t});
  return lit == pit->second.end() ? 0 : lit->second;
}

const std::map<std::pair<int, int>, int>* MLN::links_between(int i,
                                                             int j) const {
  if (i > j) std::swap(i, j);
  const auto pit = pair_links.find({i, j});
  return pit == pair_links.end() ? nullptr : &pit->second;
}

std::size_t MLN::total_links() const {
  std::size_t n = 0;
  for (const auto& [key, links] : pair_links) n += links.size();
  return n;
}

bool MCCN::linked(int i, int j) const {
  if (i > j) std::swap(i, j);
  return links.count({i, j}) != 0;
}

namespace {

// (curve pair, sample pair) in canonical order.
using VoteKey = std::pair<std::pair<int, int>, std::pair<int, int>>;

// Votes contributed by one view: each shared supporting edgel links every
// cross-curve sample pair it supports, capped at one vote per view.
std::vector<VoteKey> view_votes(
    const std::vector<Curve3D>& curves, int view,
    const std::map<int, std::map<int, std::vector<std::pair<int, int>>>>&
        edgel_map) {
  std::vector<VoteKey> votes;
  const auto vit = edgel_map.find(view);
  if (vit == edgel_map.end()) return votes;
  for (const auto& [edgel, entries] : vit->second) {
    for (size_t a = 0; a < entries.size(); ++a) {
      for (size_t b = a + 1; b < entries.size(); ++b) {
        auto [ci, si] = entries[a];
        auto [cj, sj] = entries[b];
        if (ci == cj) continue;
        if (ci > cj) {
          std::swap(ci, cj);
          std::swap(si, sj);
        }
        votes.push_back({{ci, cj}, {si, sj}});
      }
    }
  }
  std::sort(votes.begin(), votes.end());
  votes.erase(std::unique(votes.begin(), votes.end()), votes.end());
  return votes;
}

// Inverted support index: view -> edgel -> [(curve, sample)].
std::map<int, std::map<int, std::vector<std::pair<int, int>>>> invert_support(
    const std::vector<Curve3D>& curves) {
  std::map<int, std::map<int, std::vector<std::pair<int, int>>>> edgel_map;
  for (int c = 0; c < static_cast<int>(curves.size()); ++c) {
    const auto& samples = curves[c].samples;
    for (int s = 0; s < static_cast<int>(samples.size()); ++s) {
      for (const auto& [view, ids] : samples[s].support) {
        for (int id : ids) {
          edgel_map[view][id].emplace_back(c, s);
        }
      }
    }
  }
  return edgel_map;
}

MLN accumulate(const std::vector<std::vector<VoteKey>>& per_view) {
  MLN mln;
  for (const auto& votes : per_view) {
    for (const auto& [pair_key, link_key] : votes) {
      ++mln.pair_links[pair_key][link_key];
    }
  }
  return mln;
}

}  // namespace

MLN build_mln(const std::vector<Curve3D>& curves) {
  const auto edgel_map = invert_support(curves);
  std::vector<int> views;
  for (const auto& [view, unused] : edgel_map) views.push_back(view);

  std::vector<std::vector<VoteKey>> per_view(views.size());
  parallel_for(static_cast<std::int64_t>(views.size()), [&](std::int64_t k) {
    per_view[k] = view_votes(curves, views[k], edgel_map);
  });
  return accumulate(per_view);
}

MLN build_mln_serial(const std::vector<Curve3D>& curves) {
  const auto edgel_map = invert_support(curves);
  std::vector<std::vector<VoteKey>> per_view;
  for (const auto& [view, unused] : edgel_map) {
    per_view.push_back(view_votes(curves, view, edgel_map));
  }
  return accumulate(per_view);
}

MCCN build_mccn(const MLN& mln, int n_curves, int tau_eps, int tau_sl) {
  MCCN mccn;
  for (const auto& [pair_key, links] : mln.pair_links) {
    int strong = 0;
    for (const auto& [link_key, weight] : links) {
      if (weight >= tau_eps) ++strong;
    }
    if (strong > 0) mccn.strong_counts[pair_key] = strong;
    if (strong >= tau_sl) mccn.links.insert(pair_key);
  }

  // Connected components via union-find.
  std::vector<int> parent(n_curves);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [i, j] : mccn.links) {
    const int ri = find(i), rj = find(j);
    if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
  }
  std::map<int, std::vector<int>> comps;
  for (int c = 0; c < n_curves; ++c) comps[find(c)].push_back(c);
  mccn.cluster_of.assign(n_curves, -1);
  for (auto& [root, members] : comps) {
    std::sort(members.begin(), members.end());
    for (int m : members) {
      mccn.cluster_of[m] = static_cast<int>(mccn.clusters.size());
    }
    mccn.clusters.push_back(std::move(members));
  }
  return mccn;
}

MLN gap_fill(const MLN& mln, const MCCN& mccn, int g_max) {
  MLN out = mln;
  for (const auto& pair_key : mccn.links) {
    const auto pit = mln.pair_links.find(pair_key);
    if (pit == mln.pair_links.end()) continue;
    const auto& links = pit->second;
    auto& augmented = out.pair_links[pair_key];

    // Entries in (s, t) order; interpolate between s-consecutive links
    // whose hole is small on both curves and flanked on both sides.
    std::vector<std::pair<std::pair<int, int>, int>> sorted(links.begin(),
                                                            links.end());
    for (size_t k = 0; k + 1 < sorted.size(); ++k) {
      const auto [s1, t1] = sorted[k].first;
      const auto [s2, t2] = sorted[k + 1].first;
      const int w = std::min(sorted[k].second, sorted[k + 1].second);
      const int ds = s2 - s1;
      const int dt = std::abs(t2 - t1);
      if (ds < 2 || ds - 1 > g_max || (dt > 0 && dt - 1 > g_max)) continue;
      for (int step = 1; step < ds; ++step) {
        const int s = s1 + step;
        const int t = static_cast<int>(
            std::lround(t1 + double(t2 - t1) * step / ds));
        auto [it, inserted] = augmented.try_emplace({s, t}, w);
        if (!inserted) it->second = std::max(it->second, w);
      }
    }
  }
  return out;
}

}  // namespace curvedraw
