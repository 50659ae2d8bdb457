#include "rijepa/rulemine/fp_growth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rijepa::rulemine {

FpTree::FpTree(const std::vector<WeightedPath>& transactions, std::size_t min_count) {
  std::map<int, std::size_t> freq;
  for (const auto& [items, weight] : transactions)
    for (int it : items) freq[it] += weight;

  for (const auto& [item, count] : freq)
    if (count >= min_count) header_.push_back({item, count, -1});
  std::sort(header_.begin(), header_.end(), [](const HeaderEntry& a, const HeaderEntry& b) {
    return a.count != b.count ? a.count > b.count : a.item < b.item;
  });
  const int max_item = freq.empty() ? -1 : freq.rbegin()->first;
  std::vector<int> rank(static_cast<std::size_t>(max_item + 1), -1);
  for (std::size_t r = 0; r < header_.size(); ++r) rank[header_[r].item] = static_cast<int>(r);

  nodes_.push_back(Node{});  // root
  std::vector<int> tail(header_.size(), -1);
  std::vector<int> ordered;
  for (const auto& [items, weight] : transactions) {
    ordered.clear();
    for (int it : items)
      if (rank[it] >= 0) ordered.push_back(it);
    std::sort(ordered.begin(), ordered.end(), [&](int a, int b) { return rank[a] < rank[b]; });
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

    int cur = 0;
    for (int it : ordered) {
      int child = -1;
      for (int c : nodes_[cur].children)
        if (nodes_[c].item == it) {
          child = c;
          break;
        }
      if (child < 0) {
        child = static_cast<int>(nodes_.size());
        Node n;
        n.item = it;
        n.parent = cur;
        nodes_.push_back(std::move(n));
        nodes_[cur].children.push_back(child);
        const auto r = static_cast<std::size_t>(rank[it]);
        if (tail[r] < 0) {
          header_[r].head = child;
        } else {
          nodes_[tail[r]].next = child;
        }
        tail[r] = child;
      }
      nodes_[child].count += weight;
      cur = child;
    }
  }
}

std::vector<int> FpTree::prefix_path(int node) const {
  std::vector<int> path;
  for (int p = nodes_.at(node).parent; p > 0; p = nodes_[p].parent) path.push_back(nodes_[p].item);
  return path;
}

bool FpTree::check_invariants() const {
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const int p = nodes_[i].parent;
    if (p > 0 && nodes_[p].count < nodes_[i].count) return false;
  }
  for (const auto& h : header_) {
    std::size_t total = 0;
    for (int n = h.head; n >= 0; n = nodes_[n].next) {
      if (nodes_[n].item != h.item) return false;
      total += nodes_[n].count;
    }
    if (total != h.count) return false;
  }
  return true;
}

std::size_t min_support_count(double min_support, std::size_t transactions) {
  const double exact = min_support * static_cast<double>(transactions);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(exact - 1e-9)));
}

namespace {

struct Miner {
  std::size_t min_count;
  std::size_t max_length;
  std::vector<std::pair<std::vector<int>, std::size_t>> found;

  void mine(const FpTree& tree, std::vector<int>& suffix) {
    const auto& header = tree.header();
    for (std::size_t r = header.size(); r-- > 0;) {
      const auto& entry = header[r];
      suffix.push_back(entry.item);
      found.emplace_back(suffix, entry.count);
      if (max_length == 0 || suffix.size() < max_length) {
        std::vector<FpTree::WeightedPath> base;
        for (int n = entry.head; n >= 0; n = tree.nodes()[n].next) {
          auto path = tree.prefix_path(n);
          if (!path.empty()) base.emplace_back(std::move(path), tree.nodes()[n].count);
        }
        if (!base.empty()) {
          FpTree conditional(base, min_count);
          if (!conditional.empty()) mine(conditional, suffix);
        }
      }
      suffix.pop_back();
    }
  }
};

}  // namespace

std::vector<FrequentItemset> fp_growth(const std::vector<std::vector<std::string>>& transactions,
                                       const FpGrowthOptions& options) {
  if (!(options.min_support > 0.0) || options.min_support > 1.0) {
    throw std::invalid_argument("fp_growth: min_support must lie in (0, 1]");
  }
  if (transactions.empty()) return {};

  std::vector<std::string> tokens;
  for (const auto& t : transactions) tokens.insert(tokens.end(), t.begin(), t.end());
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

  std::vector<FpTree::WeightedPath> encoded;
  encoded.reserve(transactions.size());
  for (const auto& t : transactions) {
    std::vector<int> ids;
    for (const auto& tok : t) {
      ids.push_back(static_cast<int>(std::lower_bound(tokens.begin(), tokens.end(), tok) -
                                     tokens.begin()));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    encoded.emplace_back(std::move(ids), 1);
  }

  Miner miner{min_support_count(options.min_support, transactions.size()), options.max_length, {}};
  FpTree tree(encoded, miner.min_count);
  std::vector<int> suffix;
  miner.mine(tree, suffix);

  const double n = static_cast<double>(transactions.size());
  std::vector<FrequentItemset> out;
  out.reserve(miner.found.size());
  for (auto& [ids, count] : miner.found) {
    std::sort(ids.begin(), ids.end());
    FrequentItemset fi;
    for (int id : ids) fi.items.push_back(tokens[id]);
    fi.count = count;
    fi.support = static_cast<double>(count) / n;
    out.push_back(std::move(fi));
  }
  std::sort(out.begin(), out.end(),
            [](const FrequentItemset& a, const FrequentItemset& b) { return a.items < b.items; });
  return out;
}

}  // namespace rijepa::rulemine
