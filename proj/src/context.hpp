#pragma once

#include <deque>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "horn/expr.hpp"

namespace horn::detail {

struct NodeKeyHash {
    std::size_t operator()(const Node* n) const;
};
struct NodeKeyEq {
    bool operator()(const Node* a, const Node* b) const;
};

struct Context {
    std::recursive_mutex mu;
    std::deque<Node> arena;
    std::unordered_set<const Node*, NodeKeyHash, NodeKeyEq> table;
    std::unordered_map<std::uint64_t, Expr> partial_memo;  // (node id, symbol id)
    std::unordered_map<std::uint64_t, Expr> total_memo;    // (node id, tau, rule id)
    std::unordered_map<std::string, Expr> named;
};

Context& ctx();
Expr intern_node(Node&& n);

}  // namespace horn::detail
