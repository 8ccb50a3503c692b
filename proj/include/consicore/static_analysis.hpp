#pragma once

// Call graph, inter-procedural CFG, driver synthesis and vulnerable-path
// extraction.

#include "consicore/driver.hpp"
#include "consicore/ir.hpp"

#include <string>
#include <utility>
#include <vector>

namespace consicore::analysis {

enum class FnKind { Normal, Listener, Framework };

std::string_view to_string(FnKind k);

enum class FnRole { Root, Lifecycle, Listener, ProviderQuery, Helper, Sink };

struct FnNode {
    int id = 0;
    std::string name;
    FnKind kind = FnKind::Framework;
    FnRole role = FnRole::Root;
    std::string component;        // owning component (empty for root and sinks)
    std::string parent_component; // Listener only: the activity to construct first
    const ir::Function *fn = nullptr;
};

struct CallGraph {
    std::vector<FnNode> nodes; // nodes[0] is the root
    std::vector<std::pair<int, int>> edges; // caller -> callee, sorted, unique

    static constexpr int kRoot = 0;

    std::vector<int> callers(int id) const;
    std::vector<int> callees(int id) const;
    int find(std::string_view name) const;
};

CallGraph build_call_graph(const ir::MiniApp &app);

enum class IcfgNodeKind { Root, Entry, Exit, Stmt };
enum class EdgeKind { Flow, Then, Else, Call, Return, CallToReturn };

std::string_view to_string(IcfgNodeKind k);
std::string_view to_string(EdgeKind k);

struct IcfgNode {
    int id = 0;
    IcfgNodeKind kind = IcfgNodeKind::Root;
    std::string function; // qualified name (Entry, Exit, Stmt)
    int stmt_id = 0;      // Stmt
    int site = 0;         // branch statements
    std::string sink;     // sink statements
    const ir::Stmt *stmt = nullptr;
};

struct IcfgEdge {
    int from = 0;
    int to = 0;
    EdgeKind kind = EdgeKind::Flow;

    bool operator==(const IcfgEdge &) const = default;
};

struct Icfg {
    std::vector<IcfgNode> nodes; // nodes[0] is the root
    std::vector<IcfgEdge> edges;

    int stmt_node(int stmt_id) const;
};

Icfg build_icfg(const ir::MiniApp &app);

/// One driver per distinct backward call-graph path from a sink to the root,
/// deduplicated by action sequence and ordered by the path's node ids.
std::vector<Driver> synthesize_drivers(const ir::MiniApp &app, const CallGraph &cg,
    std::vector<std::string> *notes = nullptr);

struct StackEntry {
    int site = 0;
    ir::Side side = ir::Side::Then;

    bool operator==(const StackEntry &) const = default;
};

/// Branch preferences along one static path to a sink; entries[0] is the top,
/// the first conditional met in forward execution.
struct BranchStack {
    int sink_stmt = 0;
    std::string sink;
    std::vector<StackEntry> entries;
    std::vector<int> path; // ICFG node ids, root first

    bool operator==(const BranchStack &o) const { return sink_stmt == o.sink_stmt && entries == o.entries; }
};

std::vector<BranchStack> extract_vulnerable_paths(const ir::MiniApp &app, const Icfg &icfg,
    std::vector<std::string> *notes = nullptr);

struct StaticResult {
    CallGraph cg;
    Icfg icfg;
    std::vector<Driver> drivers;
    std::vector<BranchStack> stacks;
    std::vector<std::string> notes;
};

StaticResult analyze_static(const ir::MiniApp &app);

/// Caps on enumerated backward paths; exceeding one adds a note.
inline constexpr std::size_t kMaxCgPathsPerSink = 1024;
inline constexpr std::size_t kMaxStacksPerSink = 4096;

} // namespace consicore::analysis
