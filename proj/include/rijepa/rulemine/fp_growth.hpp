#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rijepa::rulemine {

struct FrequentItemset {
  std::vector<std::string> items;  // sorted
  std::size_t count = 0;
  double support = 0.0;

  friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;
};

struct FpGrowthOptions {
  double min_support = 0.04;
  // Longest itemset reported; 0 means unbounded.
  std::size_t max_length = 0;
};

// Prefix tree over integer item ids. Each transaction is inserted with its
// items ordered by descending frequency (ties by ascending id); items below
// min_count are dropped. Header entries follow the same order and chain the
// nodes of one item through node-links.
class FpTree {
 public:
  struct Node {
    int item = -1;
    std::size_t count = 0;
    int parent = -1;
    int next = -1;
    std::vector<int> children;
  };
  struct HeaderEntry {
    int item;
    std::size_t count;
    int head;
  };
  using WeightedPath = std::pair<std::vector<int>, std::size_t>;

  FpTree(const std::vector<WeightedPath>& transactions, std::size_t min_count);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<HeaderEntry>& header() const { return header_; }
  bool empty() const { return header_.empty(); }

  // Items on the path from node's parent up to (excluding) the root.
  std::vector<int> prefix_path(int node) const;

  // Root-to-leaf counts never increase, and node-link counts per item sum to
  // the header total.
  bool check_invariants() const;

 private:
  std::vector<Node> nodes_;
  std::vector<HeaderEntry> header_;
};

// Smallest absolute count whose relative support reaches min_support.
std::size_t min_support_count(double min_support, std::size_t transactions);

// Every itemset with relative support >= min_support, each with its exact
// count, sorted lexicographically by item list. Two-pass prefix-tree
// construction followed by recursive mining of conditional pattern bases.
// Duplicate tokens inside one transaction are counted once.
std::vector<FrequentItemset> fp_growth(const std::vector<std::vector<std::string>>& transactions,
                                       const FpGrowthOptions& options);

}  // namespace rijepa::rulemine
