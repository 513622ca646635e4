#pragma once

// Fixed-size-and-shape tree schemata and hyperschemata.
//
// A schema is a tree over F, T and "=" where "=" stands for exactly one
// node of the arity its position dictates; it denotes the programs of one
// shape agreeing with it off the "=" nodes. A hyperschema adds "#" leaves,
// each standing for any whole subtree. Building-block truncations and the
// mask generating function Gamma live here too.

#include "schemaforge/gp_core.hpp"
#include "schemaforge/rational.hpp"

#include <string>
#include <vector>

namespace schemaforge::gp {

class GpHyperschema;

/// Fixed-size-and-shape schema: pattern over F, T and "=".
class GpSchema {
public:
    GpSchema() = default;
    explicit GpSchema(TreeNode pattern);
    static GpSchema parse(const std::string& text, const PrimitiveSet& ps);
    /// Order-S(h) schema fixing every node of a program.
    static GpSchema from_program(const TreeProgram& p);

    const TreeNode& pattern() const { return pattern_; }
    std::string to_string() const;
    GpHyperschema to_hyperschema() const;

    bool operator==(const GpSchema& o) const { return pattern_ == o.pattern_; }
    bool operator<(const GpSchema& o) const { return pattern_ < o.pattern_; }

private:
    TreeNode pattern_;
};

/// Hyperschema: pattern over F, T, "=" and "#"; "#" appears only at leaves.
class GpHyperschema {
public:
    GpHyperschema() = default;
    explicit GpHyperschema(TreeNode pattern);
    static GpHyperschema parse(const std::string& text, const PrimitiveSet& ps);
    /// The universal pattern, a single "#".
    static GpHyperschema universal();

    const TreeNode& pattern() const { return pattern_; }
    std::string to_string() const;

    bool operator==(const GpHyperschema& o) const { return pattern_ == o.pattern_; }
    bool operator<(const GpHyperschema& o) const { return pattern_ < o.pattern_; }

private:
    TreeNode pattern_;
};

struct GpSchemaMetrics {
    unsigned order = 0;            // non-= nodes
    std::size_t length = 0;        // N(H), total nodes
    unsigned defining_length = 0;  // links of the minimal fragment containing all non-= nodes
    GpSchema shape;                // G(H): same structure, all nodes "="
};

GpSchemaMetrics gp_schema_metrics(const GpSchema& h);

/// G(H) for an arbitrary pattern (all nodes turned to "=").
GpSchema shape_of(const TreeNode& pattern);

bool gp_matches(const GpSchema& h, const TreeProgram& p);
bool gp_matches(const GpHyperschema& h, const TreeProgram& p);

/// True when the program has exactly the shape of h's G(H).
bool shape_matches(const GpSchema& shape, const TreeProgram& p);

/// The lower-building-block readings. The exact transmission theorems hold
/// for the Path form: root and path interior turned to "=" (arities kept),
/// subtrees hanging off the path turned to "#", the subtree at the point
/// kept. Literal keeps everything except the path interior; Shape keeps the
/// whole shape, wildcarding all nodes outside the point's subtree.
enum class LowerBlockForm { Path, Literal, Shape };

const char* lower_block_form_name(LowerBlockForm form);

struct BuildingBlocks {
    GpSchema u;                      // shape-preserving upper: at/below point -> "="
    GpSchema l;                      // shape-preserving lower: outside point's subtree -> "="
    GpHyperschema upper;             // U(H,i): subtree at point -> "#"
    GpHyperschema lower_path;        // see LowerBlockForm::Path
    GpHyperschema lower_literal;     // see LowerBlockForm::Literal
    GpHyperschema lower_shape;       // l as a hyperschema
};

/// Throws std::invalid_argument when point is not a coordinate of H's shape.
BuildingBlocks building_blocks(const GpSchema& h, Coord point, const PrimitiveSet& ps);

GpHyperschema lower_block(const GpSchema& h, Coord point, const PrimitiveSet& ps,
                          LowerBlockForm form);
GpHyperschema upper_block(const GpSchema& h, Coord point, const PrimitiveSet& ps);

/// Building-block generating function for homologous crossover between
/// equal-shape parents: the hyperschema agreeing with H wherever the mask
/// is 1 and "=" elsewhere. The mask must cover H's full shape. Crossing
/// p1 in gamma(H, mask) with p2 in gamma(H, complement) under `mask` yields
/// an offspring in H, and conversely.
GpHyperschema gamma(const GpSchema& h, const GpMask& mask, const PrimitiveSet& ps);

/// All programs over ps with at most max_nodes nodes (ordered, no duplicates).
std::vector<TreeProgram> enumerate_programs(const PrimitiveSet& ps, std::size_t max_nodes);

/// All programs sharing the given shape.
std::vector<TreeProgram> programs_of_shape(const GpSchema& shape, const PrimitiveSet& ps);

/// All schemata of the given shape (every node either "=" or any symbol of
/// the right arity). Grows as prod(1 + choices); caller keeps shapes small.
std::vector<GpSchema> schemata_of_shape(const GpSchema& shape, const PrimitiveSet& ps);

}  // namespace schemaforge::gp
