#pragma once

// Tree-based genetic programming core: primitive sets, programs laid out on
// the max-arity Cartesian grid, common regions, one-point and uniform
// homologous crossover, point mutation, and a generational engine.
//
// Node coordinates: the root sits at (depth 0, index 0) and child j of
// (d, i) sits at (d+1, base*i + j), base being the primitive set's maximum
// arity (at least 1). Coordinates are comparable across any two trees over
// the same primitive set.

#include "schemaforge/rational.hpp"
#include "schemaforge/rng.hpp"
#include "schemaforge/selection.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace schemaforge::gp {

struct Primitive {
    std::string name;
    unsigned arity = 0;
};

/// Function and terminal symbols; names unique, at least one terminal.
class PrimitiveSet {
public:
    PrimitiveSet(std::vector<Primitive> functions, std::vector<std::string> terminals);

    const std::vector<Primitive>& functions() const { return functions_; }
    const std::vector<std::string>& terminals() const { return terminals_; }
    unsigned max_arity() const { return max_arity_; }
    /// Grid base for node coordinates: max(1, max_arity()).
    unsigned grid_base() const { return max_arity_ == 0 ? 1 : max_arity_; }

    /// Arity of a named symbol; std::nullopt if unknown.
    std::optional<unsigned> arity_of(const std::string& name) const;
    /// All symbols of the given arity.
    std::vector<std::string> symbols_with_arity(unsigned arity) const;

private:
    std::vector<Primitive> functions_;
    std::vector<std::string> terminals_;
    unsigned max_arity_ = 0;
};

struct Coord {
    unsigned depth = 0;
    std::uint64_t index = 0;
    auto operator<=>(const Coord&) const = default;
};

inline Coord child_coord(Coord c, unsigned slot, unsigned base) {
    return {c.depth + 1, c.index * base + slot};
}
inline Coord parent_coord(Coord c, unsigned base) { return {c.depth - 1, c.index / base}; }

struct TreeNode {
    std::string symbol;
    std::vector<TreeNode> children;

    unsigned arity() const { return static_cast<unsigned>(children.size()); }
    bool operator==(const TreeNode& other) const;
    bool operator<(const TreeNode& other) const;
};

/// Immutable rooted ordered tree over a primitive set. Text form is
/// parenthesized prefix notation: "(+ a (* b b))", bare names for leaves.
class TreeProgram {
public:
    TreeProgram() : root_{"?", {}} {}
    explicit TreeProgram(TreeNode root) : root_(std::move(root)) {}

    /// Parses and validates every symbol and arity against ps.
    static TreeProgram parse(const std::string& text, const PrimitiveSet& ps);

    const TreeNode& root() const { return root_; }
    std::size_t size() const;    // node count S(h)
    unsigned depth() const;      // root at depth 0
    std::string to_string() const;
    /// Same structure with symbols replaced by arities, e.g. "(2 0 (1 0))".
    std::string shape_key() const;

    bool operator==(const TreeProgram& o) const { return root_ == o.root_; }
    bool operator<(const TreeProgram& o) const { return root_ < o.root_; }

private:
    TreeNode root_;
};

/// Parses pattern text admitting the wildcard symbols "=" (one node) and
/// "#" (leaf standing for any subtree); concrete symbols are validated
/// against ps. Accepts "#", "(#)" and "(# )" alike for a # leaf.
TreeNode parse_pattern_text(const std::string& text, const PrimitiveSet& ps);

/// Node at (d, i), or nullptr when the coordinate is unoccupied.
const TreeNode* node_at(const TreeNode& root, Coord c, unsigned base);

/// Copy of root with the subtree at c replaced. Throws when c is unoccupied.
TreeNode with_subtree_replaced(const TreeNode& root, Coord c, const TreeNode& replacement,
                               unsigned base);

/// Visits every node with its coordinate, parents before children.
void visit_coords(const TreeNode& root, unsigned base,
                  const std::function<void(Coord, const TreeNode&)>& fn);

struct NodeInfo {
    std::string name;          // N(d,i,h)
    std::size_t subtree_size;  // S(d,i,h)
    unsigned arity;            // A(d,i,h)
    bool is_function;          // F(d,i,h)
};

/// The Cartesian reference accessors; throws std::invalid_argument when
/// (d, i) is unoccupied.
NodeInfo node_accessors(const TreeProgram& t, unsigned d, std::uint64_t i, const PrimitiveSet& ps);

/// Root-anchored region where two trees have matching arities position by
/// position: the root is always a member, and a node belongs iff its parent
/// belongs and both parents' symbols at the parent coordinate agree in
/// arity. Links are the non-root members, each naming the edge to its
/// parent; one-point crossover picks among links.
struct CommonRegion {
    std::vector<Coord> nodes;  // sorted
    std::vector<Coord> links;  // nodes minus the root, sorted

    std::size_t node_count() const { return nodes.size(); }
    bool contains(Coord c) const;
};

CommonRegion common_region(const TreeProgram& t1, const TreeProgram& t2, const PrimitiveSet& ps);

/// Offspring = t1 with the subtree rooted at `point` replaced by t2's
/// subtree rooted at `point`. The point must be a common-region link.
TreeProgram one_point_crossover_gp(const TreeProgram& t1, const TreeProgram& t2, Coord point,
                                   const PrimitiveSet& ps);

/// Binary labeling of a common region: 1 takes the node from the first
/// parent, 0 from the second.
struct GpMask {
    std::map<Coord, std::uint8_t> bits;

    static GpMask constant(const CommonRegion& region, std::uint8_t value);
    static GpMask random(const CommonRegion& region, RandomStream& rng);
    GpMask complement() const;
    std::uint8_t at(Coord c) const;
    bool covers(const CommonRegion& region) const;
};

/// Homologous uniform crossover: inside the common region each node comes
/// from the mask-designated parent; where the parents' arities diverge the
/// designated parent's subtrees below that node come along.
TreeProgram uniform_crossover_gp(const TreeProgram& t1, const TreeProgram& t2, const GpMask& mask,
                                 const PrimitiveSet& ps);

/// Each node independently, with probability p_m, becomes a uniformly
/// chosen different symbol of the same arity (unchanged when no alternative
/// exists). Shape is preserved.
TreeProgram point_mutation_gp(const TreeProgram& t, const Rat& p_m, const PrimitiveSet& ps,
                              RandomStream& rng);

struct GpConfig {
    unsigned n = 2;
    Rat p_c = 0;
    Rat p_m = 0;
    enum class Crossover { OnePoint, Uniform } crossover = Crossover::OnePoint;
    SelectionSpec selection;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GpPopulation {
    std::vector<TreeProgram> members;
    unsigned generation = 0;

    std::size_t size() const { return members.size(); }
};

/// Tree fitness catalog, pure and strictly positive:
///   flat              1
///   node-count        S(h)
///   depth             depth(h) + 1
///   symbol-count(s)   1 + occurrences of symbol s
///   user-table        explicit text form -> positive rational map
class GpFitnessFunction {
public:
    static GpFitnessFunction flat();
    static GpFitnessFunction node_count();
    static GpFitnessFunction depth();
    static GpFitnessFunction symbol_count(std::string symbol);
    static GpFitnessFunction user_table(std::map<std::string, Rat> table);

    const std::string& name() const { return name_; }
    const std::string& symbol_param() const { return symbol_; }
    Rat operator()(const TreeProgram& t) const;

private:
    std::string name_;
    std::string symbol_;
    std::map<std::string, Rat> table_;
};

std::vector<Rat> selection_masses_gp(const GpPopulation& pop, const GpFitnessFunction& f);

TreeProgram select_parent_gp(const GpPopulation& pop, const GpFitnessFunction& f,
                             const GpConfig& cfg, RandomStream& rng);

/// Called once per crossover event during a generation step.
struct CrossoverObserver {
    std::function<void(const TreeProgram& parent1, const TreeProgram& child)> on_crossover;
};

/// Generational step mirroring the bitstring engine: per offspring, with
/// probability 1-p_c clone one selected parent, otherwise select two
/// parents and cross (one-point over a uniform common-region link, or
/// uniform with i.i.d. fair mask bits); a pair with no common-region links
/// degenerates to cloning the first parent. Point mutation follows.
GpPopulation next_generation_gp(const GpPopulation& pop, const GpFitnessFunction& f,
                                const GpConfig& cfg, const PrimitiveSet& ps,
                                const CrossoverObserver* observer = nullptr);

/// Random tree by the grow method: uniform over all primitives above the
/// depth limit, uniform over terminals at it.
TreeProgram random_tree(const PrimitiveSet& ps, unsigned max_depth, RandomStream& rng);

}  // namespace schemaforge::gp
