# main.py
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from nanosphere_csl.config import PRESETS, RunManifest
from nanosphere_csl.exceptions import ConfigError, SweepError
from nanosphere_csl.physics_modules import (
    build_model,
    budgets,
    csl_gas_parity_rate,
    csl_radius_maximum,
    derive,
    is_stable,
    log_negativity,
    make_grid,
    mechanical_block,
    partial_transpose,
    run_sweep,
    slope_sign_discriminator,
    solve_lyapunov,
    symplectic_eigen_min,
    scaling_suite,
    SweepSpec,
)
from nanosphere_csl.physics_modules.parameters import effective_decay
from nanosphere_csl.physics_modules.sweep import SweepResult, DiscriminatorReport
from nanosphere_csl import reporting


class EntanglementStudy:
    def __init__(self, manifest: RunManifest, output_dir: Path, quiet: bool = False, workers: int = 1,
                 fmt: str = "csv"):
        self.manifest = manifest
        self.config = manifest.system_config
        self.sweep_config = manifest.config["sweep"]
        self.output_dir = Path(output_dir)
        self.quiet = quiet
        self.workers = workers
        self.fmt = fmt

    def _say(self, message: str) -> None:
        # stdout carries the emitted data
        if not self.quiet:
            print(message, file=sys.stderr)

    @property
    def omega1(self) -> float:
        return self.sweep_config["omega1"]

    # --- single point ---

    def rates(self) -> bytes:
        dq = derive(self.config, self.omega1)
        pair = budgets(dq)
        self.manifest.settings = {"omega1": self.omega1}
        frame = reporting.rates_frame(pair, (dq.omega1, dq.omega2))
        self._say(f"📊 CSL rate matching gas diffusion: lambda* = {csl_gas_parity_rate(dq):.4g} s^-1")
        return reporting.emit(frame, self.manifest.config_hash, self.fmt)

    def model(self, csl_on: bool = True) -> bytes:
        dq = derive(self.config, self.omega1)
        model = build_model(dq, budgets(dq), csl_on)
        report = is_stable(model)
        self.manifest.settings = {"omega1": self.omega1, "csl": "on" if csl_on else "off"}
        verdict = "stable" if report.stable else "unstable"
        self._say(f"📊 Drift matrix is {verdict} (spectral abscissa {report.abscissa:.6g} s^-1)")
        return reporting.emit(reporting.model_frame(model, report), self.manifest.config_hash, self.fmt)

    def entanglement(self, csl: str = "both") -> bytes:
        dq = derive(self.config, self.omega1)
        pair = budgets(dq)
        self.manifest.settings = {"omega1": self.omega1, "csl": csl}
        variants = {"on": (True,), "off": (False,), "both": (False, True)}[csl]
        records = []
        for csl_on in variants:
            state = mechanical_block(solve_lyapunov(build_model(dq, pair, csl_on)))
            record = {
                "omega1": dq.omega1,
                "csl": "on" if csl_on else "off",
                "nu_minus": symplectic_eigen_min(partial_transpose(state)),
                "E_N": log_negativity(state),
                "total1": pair[0].total(csl_on),
                "total2": pair[1].total(csl_on),
            }
            record.update(reporting.budget_columns(pair))
            records.append(record)
        return reporting.emit(reporting.entanglement_frame(records), self.manifest.config_hash, self.fmt)

    def scaling_check(self) -> bytes:
        start_time = time.time()
        rows = scaling_suite(self.config, omega1=self.omega1)
        r_max = csl_radius_maximum(self.config)
        rows.append({"quantity": "lambda_sph", "parameter": "R_max/r_c", "expected": 2.38,
                     "fitted": r_max / self.config.csl_length,
                     "passed": abs(r_max / self.config.csl_length - 2.38) <= 0.01 * 2.38})
        self.manifest.settings = {"omega1": self.omega1}
        failed = [r for r in rows if not r["passed"]]
        self._say("✅ Scaling check complete in {:.2f}s ({} of {} laws hold)".format(
            time.time() - start_time, len(rows) - len(failed), len(rows)))
        return reporting.emit(pd.DataFrame(rows), self.manifest.config_hash, self.fmt)

    # --- sweeps ---

    def build_sweep_spec(self, parameter: str = "omega1", start: Optional[float] = None,
                         stop: Optional[float] = None, points: Optional[int] = None, log: bool = True,
                         csl: str = "both", preset: Optional[str] = None) -> SweepSpec:
        points = points or self.sweep_config["points"]
        if preset is not None:
            grid_cfg = PRESETS[preset]["grid"]
            grid = make_grid(grid_cfg["min"], grid_cfg["max"], grid_cfg["points"], log=True)
        elif start is None and stop is None and parameter == "omega1":
            kappa_eff = effective_decay(self.config)
            grid = make_grid(self.sweep_config["min_over_keff"] * kappa_eff,
                             self.sweep_config["max_over_keff"] * kappa_eff, points, log=log)
        elif start is None or stop is None:
            raise ConfigError(f"sweeping {parameter} needs both --min and --max")
        else:
            grid = make_grid(start, stop, points, log=log)
        return SweepSpec(base=self.config, grid=grid, parameter=parameter, csl=csl, preset=preset,
                         omega1=self.omega1)

    def run_sweep(self, spec: SweepSpec) -> SweepResult:
        start_time = time.time()
        self._say(f"🚀 Sweeping {spec.parameter} over {len(spec.grid)} points...")
        result = run_sweep(spec, workers=self.workers, progress=not self.quiet)
        self.manifest.settings = spec.settings()
        stable = int(result.stable.sum())
        self._say("✅ Sweep complete in {:.2f}s ({} of {} points stable)".format(
            time.time() - start_time, stable, len(result.points)))
        return result

    def discriminate(self, result: SweepResult) -> Optional[DiscriminatorReport]:
        if result.spec.csl != "both":
            return None
        try:
            return slope_sign_discriminator(result, window=self.sweep_config["window"],
                                            gap_threshold=self.sweep_config["gap_threshold"])
        except SweepError as e:
            self._say(f"⚠️ No discriminator verdict: {e}")
            return None

    def generate_reports(self, name: str, result: SweepResult,
                         report: Optional[DiscriminatorReport] = None) -> Dict[str, Path]:
        frame = reporting.sweep_frame(result)
        x = frame.columns[0]
        suffix = "csv" if self.fmt == "csv" else "txt"
        paths = {
            "data": self.output_dir / f"{name}.{suffix}",
            "plot_data": self.output_dir / f"{name}_plot.{suffix}",
            "manifest_yaml": self.output_dir / f"{name}_manifest.yaml",
            "manifest_json": self.output_dir / f"{name}_manifest.json",
            "summary": self.output_dir / f"{name}_summary.md",
            "summary_html": self.output_dir / f"{name}_summary.html",
        }
        config_hash = result.metadata.config_hash
        reporting.write_bytes(paths["data"], reporting.emit(frame, config_hash, self.fmt))
        reporting.write_bytes(paths["plot_data"],
                              reporting.emit(reporting.plot_data(frame, x=x), config_hash, self.fmt))
        self.manifest.output_paths = [str(p) for p in paths.values()]
        reporting.write_text(paths["manifest_yaml"], self.manifest.to_yaml())
        reporting.write_text(paths["manifest_json"], self.manifest.to_json())
        summary = reporting.summary_markdown(name, result, report)
        reporting.write_text(paths["summary"], summary)
        reporting.write_text(paths["summary_html"], reporting.render_html(summary))
        self._say(f"📊 Reports generated in {self.output_dir}")
        return paths

    def reproduce(self, preset: str) -> Dict[str, Any]:
        spec = self.build_sweep_spec(preset=preset)
        result = self.run_sweep(spec)
        report = self.discriminate(result)
        if report is not None:
            self._say(f"🔍 {preset}: {report.verdict} (low-omega mean gap {report.mean_gap:.3f})")
        paths = self.generate_reports(preset, result, report)
        return {"result": result, "report": report, "paths": paths}
