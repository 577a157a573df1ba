"""Geometry sweep: evaluation, baselines, and the area optimum."""

import pytest

from tilepack.costmodel import TileCostParams, tile_area
from tilepack.fragmentation import TileGeometry
from tilepack.network import (
    LayerKind,
    LayerSpec,
    NetworkSpec,
    load_network,
    lower_network,
)
from tilepack.packing.types import PackingMode
from tilepack.sweep import (
    Packer,
    RapaPlan,
    SweepConfig,
    compare_one_to_one,
    evaluate_config,
    optimize,
    prepare_layers,
)


def fc_net(name, fans):
    layers = tuple(
        LayerSpec(name=f"l{i:02d}", kind=LayerKind.FULLY_CONNECTED,
                  fan_in=a, fan_out=b)
        for i, (a, b) in enumerate(fans)
    )
    return NetworkSpec(name, layers)


# greedy shelf packing needs four 10x10 bins for these, exact needs three
FFD_NET = fc_net("ffd", [(10, 5), (10, 5), (10, 4), (10, 4),
                         (10, 3), (10, 3), (10, 3), (10, 3)])


class TestPrepareLayers:
    def test_file_overrides_apply_without_plan(self, fixtures_dir):
        net = load_network(fixtures_dir / "bert-encoder-layer.toml")
        layers = prepare_layers(net, None)
        assert [l.replication for l in layers] == [64] * 6

    def test_plan_overrides_merge_over_file(self, fixtures_dir):
        net = load_network(fixtures_dir / "bert-encoder-layer.toml")
        plan = RapaPlan(1, 1, overrides=(("ffn-up", 8),))
        layers = prepare_layers(net, plan)
        by_name = {l.name: l.replication for l in layers}
        assert by_name["ffn-up"] == 8
        assert by_name["attn-query"] == 64

    def test_unknown_override_name(self, fixtures_dir):
        net = load_network(fixtures_dir / "bert-encoder-layer.toml")
        with pytest.raises(ValueError, match="unknown layer 'nope'"):
            prepare_layers(net, RapaPlan(1, 1, overrides=(("nope", 2),)))

    def test_accepts_lowered_layers(self, fixtures_dir):
        net = load_network(fixtures_dir / "lenet.toml")
        layers = lower_network(net)
        assert prepare_layers(layers, None) == layers

    def test_decay_plan(self, fixtures_dir):
        net = load_network(fixtures_dir / "resnet18.toml")
        layers = prepare_layers(net, RapaPlan(128, 4))
        assert layers[0].replication == 128
        assert layers[1].replication == 32
        assert layers[-1].replication == 1  # classifier stays unreplicated


class TestEvaluateConfig:
    def test_worked_instance_point(self, fixtures_dir):
        net = load_network(fixtures_dir / "thirteen-items.toml")
        config = SweepConfig(mode=PackingMode.DENSE)
        point = evaluate_config(net, TileGeometry(512, 512), config)
        assert point.bin_count == 2
        assert point.fragment_total == 13
        assert point.efficiency == pytest.approx(0.38196601125010515)
        assert point.total_area == pytest.approx(
            2 * tile_area(TileGeometry(512, 512), config.cost))
        assert point.packer_used == "greedy"
        assert point.optimal is None

    def test_mode_override(self, fixtures_dir):
        net = load_network(fixtures_dir / "thirteen-items.toml")
        config = SweepConfig(mode=PackingMode.DENSE)
        point = evaluate_config(net, TileGeometry(512, 512), config,
                                PackingMode.PIPELINE)
        assert point.mode is PackingMode.PIPELINE
        assert point.bin_count == 4

    def test_exact_packer(self):
        config = SweepConfig(packer=Packer.EXACT)
        point = evaluate_config(FFD_NET, TileGeometry(10, 10), config)
        assert point.bin_count == 3
        assert point.packer_used == "exact"
        assert point.optimal is True
        assert point.nodes is not None and point.nodes > 0

    def test_exact_falls_back_when_oversubscribed(self):
        config = SweepConfig(packer=Packer.EXACT, max_exact_items=3)
        point = evaluate_config(FFD_NET, TileGeometry(10, 10), config)
        assert point.packer_used == "greedy"
        assert point.bin_count == 4
        assert point.degraded
        assert point.optimal is False


class TestCompareOneToOne:
    def test_every_fragment_gets_a_tile(self, fixtures_dir):
        net = load_network(fixtures_dir / "thirteen-items.toml")
        point = compare_one_to_one(net, TileGeometry(512, 512), SweepConfig())
        assert point.bin_count == 13
        assert point.packer_used == "one-to-one"

    def test_reference_network_at_256(self, fixtures_dir):
        net = load_network(fixtures_dir / "resnet18.toml")
        config = SweepConfig()
        baseline = compare_one_to_one(net, TileGeometry(256, 256), config)
        packed = evaluate_config(net, TileGeometry(256, 256), config)
        assert baseline.bin_count == 201
        assert packed.bin_count == 179
        assert baseline.total_area > packed.total_area


class TestOptimize:
    def test_grid_shape(self, fixtures_dir):
        net = load_network(fixtures_dir / "lenet.toml")
        config = SweepConfig(row_dims=(64, 128), aspect_multipliers=(1, 2, 3))
        report = optimize(net, config)
        assert len(report.points) == 6
        assert len(report.per_aspect_minima) == 3
        geometries = {(p.geometry.n_row, p.geometry.n_col) for p in report.points}
        assert (64, 192) in geometries and (128, 256) in geometries
        assert report.optimum in report.per_aspect_minima
        assert report.objective == "min-total-tile-area"

    def test_square_dense_optimum(self, fixtures_dir):
        net = load_network(fixtures_dir / "resnet18.toml")
        config = SweepConfig(mode=PackingMode.DENSE, aspect_multipliers=(1,))
        report = optimize(net, config)
        assert report.optimum.geometry == TileGeometry(4096, 4096)
        assert report.optimum.bin_count == 1

    def test_square_pipeline_optimum(self, fixtures_dir):
        net = load_network(fixtures_dir / "resnet18.toml")
        config = SweepConfig(mode=PackingMode.PIPELINE, aspect_multipliers=(1,))
        report = optimize(net, config)
        assert report.optimum.geometry == TileGeometry(512, 512)
        assert report.optimum.bin_count == 65

    def test_fewest_tiles_is_not_least_area(self, fixtures_dir):
        # a bigger tile can cut the tile count yet cost more silicon
        net = load_network(fixtures_dir / "resnet18.toml")
        config = SweepConfig(mode=PackingMode.DENSE, aspect_multipliers=(1,))
        points = optimize(net, config).points
        assert any(
            a.bin_count < b.bin_count and a.total_area > b.total_area
            for a in points for b in points
        )

    def test_empty_grid(self):
        with pytest.raises(ValueError, match="sweep grid is empty"):
            optimize(FFD_NET, SweepConfig(row_dims=()))

    def test_bad_aspect(self):
        with pytest.raises(ValueError, match="aspect multipliers must be >= 1"):
            optimize(FFD_NET, SweepConfig(aspect_multipliers=(0,)))

    def test_refinement_improves_optimum(self):
        config = SweepConfig(row_dims=(10,), aspect_multipliers=(1,),
                             packer=Packer.GREEDY_THEN_EXACT)
        report = optimize(FFD_NET, config)
        assert report.optimum.bin_count == 3
        assert report.optimum.packer_used == "exact"
        assert report.optimum.optimal is True

    def test_refinement_never_worsens(self, fixtures_dir):
        net = load_network(fixtures_dir / "thirteen-items.toml")
        greedy = optimize(net, SweepConfig(row_dims=(512,), aspect_multipliers=(1,)))
        refined = optimize(net, SweepConfig(row_dims=(512,), aspect_multipliers=(1,),
                                            packer=Packer.GREEDY_THEN_EXACT))
        assert refined.optimum.bin_count <= greedy.optimum.bin_count
        assert refined.optimum.total_area <= greedy.optimum.total_area

    def test_deterministic(self, fixtures_dir):
        net = load_network(fixtures_dir / "lenet.toml")
        config = SweepConfig(row_dims=(64, 128, 256), aspect_multipliers=(1, 2))
        assert optimize(net, config) == optimize(net, config)


class TestCostPropagation:
    def test_custom_cost_params_change_area(self, fixtures_dir):
        net = load_network(fixtures_dir / "thirteen-items.toml")
        cheap = SweepConfig(cost=TileCostParams(d_cnt=0.0))
        costly = SweepConfig(cost=TileCostParams(d_cnt=1000.0))
        geo = TileGeometry(512, 512)
        a = evaluate_config(net, geo, cheap)
        b = evaluate_config(net, geo, costly)
        assert a.bin_count == b.bin_count == 2
        assert a.efficiency == 1.0
        assert a.total_area < b.total_area

    def test_latency_fields(self, fixtures_dir):
        net = load_network(fixtures_dir / "resnet18.toml")
        point = evaluate_config(net, TileGeometry(512, 512), SweepConfig())
        assert point.latency_sequential == 30234
        assert point.latency_pipelined == 12544
