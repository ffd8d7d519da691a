import os

# BLAS 线程数须在 numpy 首次导入前确定
_THREADS = os.environ.get("XTQM_THREADS", "1")
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, _THREADS)

import argparse
import logging
import sys
import time
from typing import Sequence

from bark import BarkNotifier
from config import Config, ConfigError, ExperimentConfig
from experiments import get_experiment, list_experiments
from kg_modes import AccuracyError, SingularityError
from lattice import ProbeError, StabilityError
from logger import resolve_level, setup_logger
from models import RunReport
from operator_core import DegenerateNormalizationError, NumericError, XtqmError
from report import write_report

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2

# 输入合法但运行中途数值失败
NUMERIC_FAILURES = (AccuracyError, SingularityError, NumericError, DegenerateNormalizationError,
                    StabilityError, ProbeError)


class XtqmApp:
    def __init__(self, config: Config, experiment: str | None = None):
        self.config = config
        self.bark = BarkNotifier(config.get("BARK_API", ""))
        self.logger = logging.getLogger(__name__)
        name = experiment or config.get("EXPERIMENT")
        if not name:
            raise ConfigError("未指定实验（EXPERIMENT 或 --experiment）")
        self.experiment = get_experiment(name)
        # 参数合并与校验在启动时一次完成，之后的运行只读
        self.run_config = ExperimentConfig.build(config, self.experiment.defaults,
                                                 self.experiment.randomized, self.experiment.name)
        self.logger.info(f"实验: {self.experiment.name}（{self.experiment.description}）")
        if self.run_config.overridden:
            self.logger.info(f"显式参数: {', '.join(self.run_config.overridden)}")

    def run_task(self) -> RunReport:
        """运行实验、写出报告并发送通知；检查失败不抛异常，由 RunReport 体现"""
        started = time.perf_counter()
        result = self.experiment.runner(dict(self.run_config.params), self.run_config.policy)
        report = RunReport(self.experiment.name, dict(self.run_config.params), result.checks,
                           time.perf_counter() - started)
        write_report(report, result.tables, self.run_config.output_dir)

        failed = report.failed_checks
        self.logger.info(
            f"运行完成：检查 {len(report.checks)} 项 | 失败 {len(failed)} 项 | 耗时 {report.wall_time:.2f}s"
        )
        for check in failed:
            self.logger.warning(
                f"检查未通过: {check.name} 实测={check.measured:.6e} 期望={check.expected:.6e} "
                f"容差={check.tolerance:.1e} ({check.mode.value})"
            )
        self.bark.send_run_report(report)
        return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xtqm", description="扩展时空量子力学数值实验")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="运行一个实验")
    run.add_argument("experiment", nargs="?", help="实验名（也可用 --experiment 或配置 EXPERIMENT）")
    run.add_argument("params", nargs="*", help="实验参数 key=value，等价于 --set PARAMS.key=value")
    run.add_argument("--experiment", dest="experiment_option", help="实验名")
    run.add_argument("--config", help="YAML 配置文件路径（默认 CONFIG_PATH 或项目根 config.yaml）")
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                     help="覆盖配置项，如 NUMERIC.equality_tol=1e-9（可重复）")
    run.add_argument("--output-dir", help="输出目录（覆盖 OUTPUT_DIR）")

    sub.add_parser("list", help="列出全部实验")
    return parser


def _run(args: argparse.Namespace) -> int:
    positional = ([args.experiment] if args.experiment else []) + list(args.params)
    name = args.experiment_option
    # 第一个不含 '=' 的位置参数是实验名，其余都是 key=value
    if name is None and positional and "=" not in positional[0]:
        name = positional.pop(0)
    config = Config(args.config, required=bool(args.config))
    config.apply_overrides(args.overrides)
    config.apply_overrides(positional)
    if args.output_dir:
        config.set_nested("OUTPUT_DIR", args.output_dir)

    setup_logger(resolve_level(config.get("LEVEL", "INFO")), config.get("LOG_DIR"))
    logger = logging.getLogger(__name__)
    logger.info("xtqm 启动")

    app = XtqmApp(config, name)
    report = app.run_task()
    return EXIT_PASS if report.overall_pass else EXIT_CHECK_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for name, description in list_experiments():
            print(f"{name}\t{description}")
        return EXIT_PASS

    try:
        code = _run(args)
    except NUMERIC_FAILURES as e:
        print(f"数值失败: {e}", file=sys.stderr)
        logging.error(f"数值失败 ({type(e).__name__}): {e}")
        code = EXIT_CHECK_FAILED
    except (ConfigError, XtqmError, ValueError) as e:
        # 参数或配置非法：不产生报告
        print(f"参数错误: {e}", file=sys.stderr)
        logging.error(f"参数错误: {e}")
        code = EXIT_INVALID
    except Exception as e:
        print(f"程序运行失败: {str(e)}", file=sys.stderr)
        logging.error(f"程序运行失败: {str(e)}", exc_info=True)
        code = EXIT_CHECK_FAILED
    finally:
        # 关闭日志系统，确保所有日志都已写入
        logging.shutdown()
    return code


if __name__ == "__main__":
    sys.exit(main())
