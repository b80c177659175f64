#include "kernel.hpp"

#include <algorithm>
#include <chrono>

namespace modcheck {

namespace {
constexpr double kVarDecay = 1.0 / 0.95;
constexpr long kRestartUnit = 100;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}
}  // namespace

long luby(long i) {
    long size = 1, seq = 0;
    while (size < i + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != i) {
        size = (size - 1) >> 1;
        --seq;
        i = i % size;
    }
    return 1L << seq;
}

Solver::Solver(int num_vars, int num_nodes) { reset(num_vars, num_nodes); }

void Solver::reset(int num_vars, int num_nodes) {
    n_ = num_vars;
    num_nodes_ = num_nodes;
    ok_ = true;
    stats = Stats();
    value_.assign(2 * n_ + 2, 0);
    level_.assign(n_ + 1, 0);
    reason_.assign(n_ + 1, -1);
    phase_.assign(n_ + 1, 0);
    activity_.assign(n_ + 1, 0.0);
    var_inc_ = 1.0;
    trail_.clear();
    trail_lim_.clear();
    qhead_ = 0;
    clauses_.clear();
    watches_.resize(2 * n_ + 2);
    for (auto& w : watches_) w.clear();
    std::vector<HeapEntry> init;
    init.reserve(n_);
    for (int v = 1; v <= n_; ++v) init.emplace_back(0.0, v);
    heap_ = Heap(std::greater<HeapEntry>(), std::move(init));
    edge_a_.assign(n_ + 1, -1);
    edge_b_.assign(n_ + 1, -1);
    out_.resize(num_nodes_);
    for (auto& o : out_) o.clear();
    edge_added_.assign(n_ + 1, 0);
    bfs_parent_state_.assign(2 * num_nodes_, -1);
    bfs_parent_var_.assign(2 * num_nodes_, -1);
    bfs_stamp_.assign(2 * num_nodes_, 0);
    bfs_epoch_ = 0;
    seen_.assign(n_ + 1, 0);
}

void Solver::add_edge(int var, int a, int b) {
    edge_a_[var] = a;
    edge_b_[var] = b;
}

bool Solver::add_clause(const std::vector<int>& dimacs) {
    if (!ok_) return false;
    std::vector<int> out;
    out.reserve(dimacs.size());
    for (int x : dimacs) {
        int lit = to_lit(x);
        bool neg_seen = std::find(out.begin(), out.end(), lit ^ 1) != out.end();
        if (neg_seen || value_[lit] == 1) return true;
        if (value_[lit] == -1) continue;
        if (std::find(out.begin(), out.end(), lit) == out.end()) out.push_back(lit);
    }
    if (out.empty()) {
        ok_ = false;
        return false;
    }
    if (out.size() == 1) {
        assign(out[0], -1);
        if (propagate() >= 0) {
            ok_ = false;
            return false;
        }
        return true;
    }
    int idx = static_cast<int>(clauses_.size());
    clauses_.push_back(out);
    watches_[out[0]].push_back(idx);
    watches_[out[1]].push_back(idx);
    return true;
}

void Solver::assign(int lit, int reason) {
    int v = lit >> 1;
    value_[lit] = 1;
    value_[lit ^ 1] = -1;
    level_[v] = static_cast<int>(trail_lim_.size());
    reason_[v] = reason;
    trail_.push_back(lit);
}

void Solver::cancel_until(int lvl) {
    if (static_cast<int>(trail_lim_.size()) <= lvl) return;
    size_t stop = trail_lim_[lvl];
    for (size_t i = trail_.size(); i-- > stop;) {
        int lit = trail_[i];
        int v = lit >> 1;
        if (edge_added_[v]) {
            int src = value_[2 * v] == 1 ? edge_a_[v] : edge_b_[v];
            out_[src].pop_back();
            edge_added_[v] = 0;
        }
        phase_[v] = (lit & 1) == 0;
        value_[lit] = 0;
        value_[lit ^ 1] = 0;
        reason_[v] = -1;
        heap_.emplace(-activity_[v], v);
    }
    trail_.resize(stop);
    trail_lim_.resize(lvl);
    qhead_ = std::min(qhead_, stop);
}

bool Solver::find_path(int start, int goal, bool strict0, std::vector<int>& path) {
    path.clear();
    if (start == goal && strict0) return true;
    ++bfs_epoch_;
    int s0 = 2 * start + (strict0 ? 1 : 0);
    bfs_stamp_[s0] = bfs_epoch_;
    bfs_parent_state_[s0] = -1;
    bfs_queue_.clear();
    bfs_queue_.push_back(s0);
    auto unwind = [&](int state) {
        while (bfs_parent_state_[state] != -1) {
            path.push_back(bfs_parent_var_[state]);
            state = bfs_parent_state_[state];
        }
    };
    for (size_t head = 0; head < bfs_queue_.size(); ++head) {
        int state = bfs_queue_[head];
        int node = state >> 1;
        bool flag = state & 1;
        if (node == goal && flag && state != s0) {
            unwind(state);
            return true;
        }
        for (const OutEdge& e : out_[node]) {
            bool nflag = flag || e.strict;
            int nxt = 2 * e.dst + (nflag ? 1 : 0);
            if (bfs_stamp_[nxt] == bfs_epoch_) continue;
            bfs_stamp_[nxt] = bfs_epoch_;
            bfs_parent_state_[nxt] = state;
            bfs_parent_var_[nxt] = e.var;
            if (e.dst == goal && nflag) {
                path.push_back(e.var);
                unwind(state);
                return true;
            }
            bfs_queue_.push_back(nxt);
        }
    }
    return false;
}

bool Solver::theory_add(int lit, std::vector<int>& conflict) {
    int v = lit >> 1;
    int a = edge_a_[v], b = edge_b_[v];
    int src, dst;
    bool strict;
    if ((lit & 1) == 0) {
        src = a; dst = b; strict = true;
    } else {
        src = b; dst = a; strict = false;
    }
    std::vector<int> cycle;
    bool found = find_path(dst, src, strict, cycle);
    out_[src].push_back(OutEdge{dst, strict, v});
    edge_added_[v] = 1;
    if (!found) return false;
    conflict.clear();
    conflict.push_back(lit ^ 1);
    for (int ev : cycle) conflict.push_back(edge_true_lit(ev) ^ 1);
    return true;
}

int Solver::propagate() {
    std::vector<int> conflict;
    while (qhead_ < trail_.size()) {
        int lit = trail_[qhead_++];
        ++stats.propagations;
        int v = lit >> 1;
        if (edge_a_[v] >= 0 && theory_add(lit, conflict)) {
            ++stats.theory_conflicts;
            int idx = static_cast<int>(clauses_.size());
            clauses_.push_back(conflict);
            if (conflict.size() >= 2) {
                watches_[conflict[0]].push_back(idx);
                watches_[conflict[1]].push_back(idx);
            }
            return idx;
        }
        int false_lit = lit ^ 1;
        std::vector<int>& ws = watches_[false_lit];
        size_t i = 0, j = 0, nws = ws.size();
        while (i < nws) {
            int ci = ws[i++];
            std::vector<int>& c = clauses_[ci];
            if (c[0] == false_lit) {
                c[0] = c[1];
                c[1] = false_lit;
            }
            int first = c[0];
            if (value_[first] == 1) {
                ws[j++] = ci;
                continue;
            }
            bool found = false;
            for (size_t k = 2; k < c.size(); ++k) {
                if (value_[c[k]] != -1) {
                    c[1] = c[k];
                    c[k] = false_lit;
                    watches_[c[1]].push_back(ci);
                    found = true;
                    break;
                }
            }
            if (found) continue;
            ws[j++] = ci;
            if (value_[first] == -1) {
                while (i < nws) ws[j++] = ws[i++];
                ws.resize(j);
                return ci;
            }
            assign(first, ci);
        }
        ws.resize(j);
    }
    return -1;
}

void Solver::bump(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (int k = 1; k <= n_; ++k) activity_[k] *= 1e-100;
        var_inc_ *= 1e-100;
        std::vector<HeapEntry> entries;
        for (int k = 1; k <= n_; ++k)
            if (value_[2 * k] == 0) entries.emplace_back(-activity_[k], k);
        heap_ = Heap(std::greater<HeapEntry>(), std::move(entries));
    } else if (value_[2 * v] == 0) {
        heap_.emplace(-activity_[v], v);
    }
}

int Solver::analyze(int confl, std::vector<int>& learnt) {
    learnt.assign(1, 0);
    int counter = 0;
    int p = -1;
    long idx = static_cast<long>(trail_.size()) - 1;
    int cur_level = static_cast<int>(trail_lim_.size());
    int clause_idx = confl;
    while (true) {
        const std::vector<int>& clause = clauses_[clause_idx];
        // a reason clause holds its implied literal first
        for (size_t k = (p == -1 ? 0 : 1); k < clause.size(); ++k) {
            int q = clause[k];
            int v = q >> 1;
            if (!seen_[v] && level_[v] > 0) {
                seen_[v] = 1;
                bump(v);
                if (level_[v] >= cur_level) ++counter;
                else learnt.push_back(q);
            }
        }
        while (!seen_[trail_[idx] >> 1]) --idx;
        p = trail_[idx];
        --idx;
        int v = p >> 1;
        seen_[v] = 0;
        --counter;
        if (counter <= 0) break;
        clause_idx = reason_[v];
    }
    learnt[0] = p ^ 1;
    // drop literals implied by the rest of the clause
    std::vector<int> keep{learnt[0]};
    for (size_t k = 1; k < learnt.size(); ++k) {
        int q = learnt[k];
        int r = reason_[q >> 1];
        bool needed = r == -1;
        if (!needed) {
            for (int x : clauses_[r]) {
                if (x == (q ^ 1)) continue;
                if (!seen_[x >> 1] && level_[x >> 1] > 0) {
                    needed = true;
                    break;
                }
            }
        }
        if (needed) keep.push_back(q);
    }
    for (size_t k = 1; k < learnt.size(); ++k) seen_[learnt[k] >> 1] = 0;
    learnt.swap(keep);
    if (learnt.size() == 1) return 0;
    size_t best = 1;
    for (size_t k = 2; k < learnt.size(); ++k)
        if (level_[learnt[k] >> 1] > level_[learnt[best] >> 1]) best = k;
    std::swap(learnt[1], learnt[best]);
    return level_[learnt[1] >> 1];
}

int Solver::pick() {
    while (!heap_.empty()) {
        HeapEntry top = heap_.top();
        heap_.pop();
        int v = top.second;
        if (value_[2 * v] == 0 && -top.first == activity_[v]) return v;
    }
    for (int v = 1; v <= n_; ++v)
        if (value_[2 * v] == 0) return v;
    return 0;
}

int Solver::solve(long max_conflicts, double timeout_seconds) {
    if (!ok_) return UNSAT;
    if (propagate() >= 0) return UNSAT;
    double deadline = timeout_seconds > 0 ? now_seconds() + timeout_seconds : 0.0;
    long restarts = 0;
    long budget = luby(restarts) * kRestartUnit;
    long since_restart = 0;
    std::vector<int> learnt;
    while (true) {
        int confl = propagate();
        if (confl >= 0) {
            ++stats.conflicts;
            ++since_restart;
            if (trail_lim_.empty()) return UNSAT;
            int back = analyze(confl, learnt);
            cancel_until(back);
            if (learnt.size() == 1) {
                assign(learnt[0], -1);
            } else {
                int idx = static_cast<int>(clauses_.size());
                clauses_.push_back(learnt);
                watches_[learnt[0]].push_back(idx);
                watches_[learnt[1]].push_back(idx);
                assign(learnt[0], idx);
            }
            var_inc_ *= kVarDecay;
            if (max_conflicts && stats.conflicts >= max_conflicts) return UNKNOWN;
            if (deadline > 0 && (stats.conflicts & 63) == 0 && now_seconds() > deadline) return UNKNOWN;
            continue;
        }
        if (since_restart >= budget) {
            ++restarts;
            budget = luby(restarts) * kRestartUnit;
            since_restart = 0;
            cancel_until(0);
            continue;
        }
        int v = pick();
        if (v == 0) return SAT;
        ++stats.decisions;
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        assign(phase_[v] ? 2 * v : 2 * v + 1, -1);
    }
}

std::vector<int8_t> Solver::model() const {
    std::vector<int8_t> m(n_ + 1, 0);
    for (int v = 1; v <= n_; ++v) m[v] = value_[2 * v] == 1 ? 1 : 0;
    return m;
}

}  // namespace modcheck
