#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace pid {

using NodeId = std::size_t;

// Dense set of node ids over a fixed universe. Members are always
// reported in ascending id order, which is declaration order.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::size_t universe) : bits_(universe, false) {}
  NodeSet(std::size_t universe, std::initializer_list<NodeId> ids) : bits_(universe, false) {
    for (NodeId id : ids) insert(id);
  }

  std::size_t universe() const { return bits_.size(); }

  bool contains(NodeId id) const { return id < bits_.size() && bits_[id]; }
  void insert(NodeId id) {
    if (id >= bits_.size()) bits_.resize(id + 1, false);
    bits_[id] = true;
  }
  void erase(NodeId id) {
    if (id < bits_.size()) bits_[id] = false;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (bool b : bits_) n += b ? 1 : 0;
    return n;
  }
  bool empty() const { return count() == 0; }

  std::vector<NodeId> members() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  NodeSet& operator|=(const NodeSet& other) {
    if (other.bits_.size() > bits_.size()) bits_.resize(other.bits_.size(), false);
    for (NodeId i = 0; i < other.bits_.size(); ++i)
      if (other.bits_[i]) bits_[i] = true;
    return *this;
  }

  NodeSet& operator&=(const NodeSet& other) {
    for (NodeId i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !other.contains(i)) bits_[i] = false;
    return *this;
  }

  bool subset_of(const NodeSet& other) const {
    for (NodeId i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !other.contains(i)) return false;
    return true;
  }

  bool intersects(const NodeSet& other) const {
    for (NodeId i = 0; i < bits_.size(); ++i)
      if (bits_[i] && other.contains(i)) return true;
    return false;
  }

  friend bool operator==(const NodeSet& a, const NodeSet& b) {
    return a.subset_of(b) && b.subset_of(a);
  }

 private:
  std::vector<bool> bits_;
};

inline NodeSet operator|(NodeSet a, const NodeSet& b) { return a |= b; }
inline NodeSet operator&(NodeSet a, const NodeSet& b) { return a &= b; }

}  // namespace pid
