// CDCL search with an acyclicity theory over edge variables.
//
// Same algorithm and heuristics as _pykernel.py, so both kernels explore the
// same search tree on the same input.
#pragma once

#include <cstddef>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

namespace modcheck {

enum Status { UNSAT = 0, SAT = 1, UNKNOWN = -1 };

struct Stats {
    long conflicts = 0;
    long decisions = 0;
    long propagations = 0;
    long theory_conflicts = 0;
};

struct OutEdge {
    int dst;
    bool strict;
    int var;
};

class Solver {
public:
    Solver(int num_vars, int num_nodes);
    void reset(int num_vars, int num_nodes);
    // an edge variable: true is ts(a) < ts(b), false is ts(b) <= ts(a)
    void add_edge(int var, int a, int b);
    // DIMACS literals; returns false once the clause set is known unsatisfiable
    bool add_clause(const std::vector<int>& dimacs);
    int solve(long max_conflicts, double timeout_seconds);
    std::vector<int8_t> model() const;
    Stats stats;

private:
    using HeapEntry = std::pair<double, int>;  // (-activity, var)
    using Heap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>>;

    int n_ = 0;
    int num_nodes_ = 0;
    bool ok_ = true;
    std::vector<int8_t> value_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<char> phase_;
    std::vector<double> activity_;
    double var_inc_ = 1.0;
    std::vector<int> trail_;
    std::vector<int> trail_lim_;
    size_t qhead_ = 0;
    std::vector<std::vector<int>> clauses_;
    std::vector<std::vector<int>> watches_;
    Heap heap_;

    std::vector<int> edge_a_, edge_b_;
    std::vector<std::vector<OutEdge>> out_;
    std::vector<char> edge_added_;

    // BFS scratch, indexed by 2 * node + flag
    std::vector<int> bfs_parent_state_, bfs_parent_var_, bfs_stamp_;
    std::vector<int> bfs_queue_;
    int bfs_epoch_ = 0;

    std::vector<char> seen_;

    static int to_lit(int x) { return x > 0 ? 2 * x : -2 * x + 1; }
    void assign(int lit, int reason);
    void cancel_until(int lvl);
    bool theory_add(int lit, std::vector<int>& conflict);
    bool find_path(int start, int goal, bool strict0, std::vector<int>& path);
    int edge_true_lit(int v) const { return value_[2 * v] == 1 ? 2 * v : 2 * v + 1; }
    int propagate();
    void bump(int v);
    int analyze(int confl, std::vector<int>& learnt);
    int pick();
};

long luby(long i);

}  // namespace modcheck
