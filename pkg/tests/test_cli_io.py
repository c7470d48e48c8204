import json
import math

import pytest

from mwtrees.cli_io import (
    DrawingDocument,
    TreeDocument,
    cli_main,
    drawing_from_json,
    drawing_to_json,
    load_drawing,
    load_tree,
    render_svg,
    save_drawing,
    save_tree,
    tree_from_json,
)
from mwtrees.construct import draw_star_pair, draw_tree_pair
from mwtrees.errors import ParseError
from mwtrees.tree_model import (
    RootedTree,
    Tree,
    gen_corollary_family,
    is_sparse,
)


class TestTreeDocuments:
    def test_round_trip(self, tmp_path):
        rt, leaf_set = gen_corollary_family(2)
        doc = TreeDocument(rt.tree, root=0,
                           sparse_leaves=tuple(sorted(leaf_set.leaf_ids)),
                           children_order={0: rt.children[0]})
        path = tmp_path / "t.json"
        save_tree(doc, str(path))
        loaded = load_tree(str(path))
        assert loaded.tree.edges == rt.tree.edges
        assert loaded.root == 0
        assert set(loaded.sparse_leaves) == set(leaf_set.leaf_ids)
        ok, _ = is_sparse(loaded.rooted(), set(loaded.sparse_leaves))
        assert ok

    def test_bad_edge_index_named(self):
        data = {"format": "tree/1", "n": 3, "edges": [[0, 1], [1, 9]]}
        with pytest.raises(ParseError) as err:
            tree_from_json(data)
        assert "#1" in str(err.value)

    def test_non_tree_rejected(self):
        data = {"format": "tree/1", "n": 3, "edges": [[0, 1]]}
        with pytest.raises(ParseError):
            tree_from_json(data)

    def test_wrong_format(self):
        with pytest.raises(ParseError):
            tree_from_json({"format": "tree/9", "n": 1, "edges": []})


class TestDrawingDocuments:
    def test_lossless_round_trip(self, tmp_path):
        rt = RootedTree.from_tree(Tree(3, ((0, 1), (0, 2))), 0)
        d = draw_tree_pair(rt, rt)
        path = tmp_path / "d.json"
        save_drawing(DrawingDocument(d), str(path))
        loaded = load_drawing(str(path)).drawing
        assert loaded.points0 == d.points0
        assert loaded.points1 == d.points1
        assert loaded.edges0 == d.edges0
        assert loaded.parallelogram.a0 == d.parallelogram.a0
        assert loaded.parallelogram.b1_id == d.parallelogram.b1_id

    def test_awkward_floats_survive(self):
        d = draw_star_pair(3).drawing
        data = drawing_to_json(DrawingDocument(d))
        loaded = drawing_from_json(json.loads(json.dumps(data))).drawing
        assert loaded.points0 == d.points0

    def test_missing_vertex_reference(self):
        data = {
            "format": "drawing/1",
            "points0": [{"id": 0, "x": 0.0, "y": 0.0}],
            "points1": [{"id": 0, "x": 1.0, "y": 1.0}],
            "edges0": [[0, 3]],
            "edges1": [],
        }
        with pytest.raises(ParseError) as err:
            drawing_from_json(data)
        assert "edges0[0]" in str(err.value)


class TestSvg:
    def test_deterministic(self):
        d = draw_star_pair(2).drawing
        a = render_svg(d, regions_beta=1.0, show_separating_line=True)
        b = render_svg(d, regions_beta=1.0, show_separating_line=True)
        assert a == b

    def test_gabriel_overlay_one_circle_per_edge(self):
        d = draw_star_pair(2).drawing
        text = render_svg(d, regions_beta=1.0)
        hollow = text.count('fill="none" stroke="#')
        assert hollow == len(d.edges0) + len(d.edges1)

    def test_strip_overlay_two_lines_per_edge(self):
        d = draw_star_pair(1).drawing
        text = render_svg(d, regions_beta=math.inf)
        dashed = text.count("stroke-dasharray")
        assert dashed == 2 * (len(d.edges0) + len(d.edges1))

    def test_vertices_present(self):
        d = draw_star_pair(1).drawing
        text = render_svg(d)
        assert text.count("<circle") == len(d.points0) + len(d.points1)


class TestCli:
    def test_corollary_pipeline(self, tmp_path):
        tree = tmp_path / "tree.json"
        drawing = tmp_path / "drawing.json"
        graphs = tmp_path / "graphs.json"
        svg = tmp_path / "out.svg"
        assert cli_main(["gen", "--kind", "corollary", "--m", "1",
                         "-o", str(tree)]) == 0
        assert cli_main(["draw", "--mode", "pruned", "-i", str(tree),
                         "-o", str(drawing), "--trace"]) == 0
        assert cli_main(["verify", "-i", str(drawing),
                         "--beta", "1,2,inf", "--mode", "strict"]) == 0
        assert cli_main(["extract", "-i", str(drawing), "--beta", "1",
                         "--closure", "closed", "-o", str(graphs)]) == 0
        data = json.loads(graphs.read_text())
        assert len(data["edges0"]) == 6
        assert len(data["edges1"]) == 5
        assert cli_main(["svg", "-i", str(drawing), "-o", str(svg),
                         "--sep-line", "--parallelogram"]) == 0
        assert svg.read_text().startswith("<?xml")

    def test_verify_detects_corruption(self, tmp_path):
        tree = tmp_path / "tree.json"
        drawing = tmp_path / "drawing.json"
        assert cli_main(["gen", "--kind", "caterpillar", "--n", "8",
                         "--seed", "3", "-o", str(tree)]) == 0
        assert cli_main(["draw", "--mode", "caterpillar", "-i", str(tree),
                         "-o", str(drawing)]) == 0
        assert cli_main(["verify", "-i", str(drawing), "--beta", "1",
                         "--mode", "closed"]) == 0
        data = json.loads(drawing.read_text())
        data["points0"][0]["x"] += 40.0
        drawing.write_text(json.dumps(data))
        assert cli_main(["verify", "-i", str(drawing), "--beta", "1",
                         "--mode", "closed"]) == 1

    def test_draw_non_caterpillar_fails(self, tmp_path):
        tree = tmp_path / "tree.json"
        spider = Tree(7, ((0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)))
        save_tree(TreeDocument(spider), str(tree))
        assert cli_main(["draw", "--mode", "caterpillar", "-i", str(tree),
                         "-o", str(tmp_path / "x.json")]) == 1

    def test_usage_error(self):
        assert cli_main(["draw"]) == 2

    def test_tree_mode_round_trip(self, tmp_path):
        tree = tmp_path / "tree.json"
        drawing = tmp_path / "drawing.json"
        assert cli_main(["gen", "--kind", "random", "--n", "9", "--seed", "4",
                         "--max-depth", "3", "-o", str(tree)]) == 0
        assert cli_main(["draw", "--mode", "tree", "-i", str(tree),
                         "-o", str(drawing)]) == 0
        assert cli_main(["verify", "-i", str(drawing),
                         "--beta", "1,1.5,2,5,10,inf", "--mode", "strict"]) == 0

    def test_determinism(self, tmp_path):
        files = []
        for tag in ("a", "b"):
            tree = tmp_path / f"tree_{tag}.json"
            drawing = tmp_path / f"drawing_{tag}.json"
            svg = tmp_path / f"out_{tag}.svg"
            cli_main(["gen", "--kind", "caterpillar", "--n", "12", "--seed", "5",
                      "-o", str(tree)])
            cli_main(["draw", "--mode", "caterpillar", "-i", str(tree),
                      "-o", str(drawing)])
            cli_main(["svg", "-i", str(drawing), "-o", str(svg),
                      "--regions", "1", "--sep-line"])
            files.append((tree.read_bytes(), drawing.read_bytes(), svg.read_bytes()))
        assert files[0] == files[1]
