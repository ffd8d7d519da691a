import os
from dataclasses import dataclass, field
from pathlib import Path
import yaml
import logging
from typing import Dict, Any, Iterable, List, Mapping, Optional

from models import NumericPolicy


class ConfigError(ValueError):
    """配置非法（未知键、缺少种子、值类型错误）；CLI 以退出码 2 报告"""
    pass


class Config:
    # 允许的顶层键；其余一律拒绝
    ALLOWED_KEYS = ('LEVEL', 'BARK_API', 'OUTPUT_DIR', 'LOG_DIR', 'EXPERIMENT', 'NUMERIC', 'PARAMS')

    def __init__(self, config_path: str | None = None, required: bool = True):
        env_path = os.getenv("CONFIG_PATH")
        if config_path:
            self.config_path = Path(config_path)
        elif env_path:
            self.config_path = Path(env_path)
        else:
            # __file__ 在 src/config.py，这里取上一级作为项目根
            self.config_path = Path(__file__).resolve().parent.parent / "config.yaml"

        # 备用：如果上面的路径不存在，再尝试 cwd 下同名文件
        if not self.config_path.exists():
            alt = Path.cwd() / self.config_path.name
            if alt.exists():
                self.config_path = alt

        self.config: Dict[str, Any] = {}
        # 未显式指定且默认文件不存在时，以空配置（全部默认值）运行
        if not required and not config_path and not self.config_path.exists():
            logging.info(f"未找到配置文件 {self.config_path}，使用默认配置")
            return
        logging.info(f"使用配置文件: {self.config_path} (cwd={Path.cwd()})")
        self.load_config()

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "Config":
        """不读文件，直接由字典构造（测试与程序化调用）"""
        instance = cls.__new__(cls)
        instance.config_path = None
        instance.config = dict(mapping)
        instance.validate()
        return instance

    def load_config(self) -> None:
        """加载配置文件"""
        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                self.config = yaml.safe_load(f) or {}
            logging.info(f"配置文件加载成功: {self.config_path}")
        except FileNotFoundError:
            logging.error(f"配置文件未找到: {self.config_path}")
            raise ConfigError(f"配置文件未找到: {self.config_path}")
        except yaml.YAMLError as e:
            logging.error(f"配置文件解析失败: {str(e)}")
            raise ConfigError(f"配置文件不是合法 YAML: {e}")
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.config, dict):
            raise ConfigError("配置文件顶层必须是映射")
        unknown = sorted(set(self.config) - set(self.ALLOWED_KEYS))
        if unknown:
            raise ConfigError(f"未知的顶层配置键: {', '.join(unknown)}（允许: {', '.join(self.ALLOWED_KEYS)}）")
        for key in ('NUMERIC', 'PARAMS'):
            if self.config.get(key) is not None and not isinstance(self.config[key], dict):
                raise ConfigError(f"{key} 必须是映射")

    def get(self, key: str, default: Any = None) -> Any:
        """获取一级配置项"""
        return self.config.get(key, default)

    def get_nested(self, path: str, default: Optional[Any] = None) -> Any:
        """
        获取层级配置项（支持类似 'PARAMS.seed' 的路径）
        :param path: 层级路径，用 '.' 分隔
        :param default: 路径不存在时的默认返回值
        """
        current = self.config
        for key in path.split('.'):
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                return default
        return current

    def set_nested(self, path: str, value: Any) -> None:
        """写入层级配置项；不含 '.' 且不是顶层键的裸键视为 PARAMS 下的参数"""
        if '.' in path:
            keys = path.split('.')
        else:
            keys = [path] if path in self.ALLOWED_KEYS else ['PARAMS', path]
        if keys[0] not in self.ALLOWED_KEYS:
            raise ConfigError(f"未知的顶层配置键: {keys[0]}")
        current = self.config
        for key in keys[:-1]:
            node = current.get(key)
            if node is None:
                node = current[key] = {}
            elif not isinstance(node, dict):
                raise ConfigError(f"{key} 不是映射，无法写入 {path}")
            current = node
        current[keys[-1]] = value

    def apply_overrides(self, assignments: Iterable[str]) -> None:
        """`--set key=value` 覆盖；值按 YAML 标量解析（数字、布尔、列表）"""
        for item in assignments:
            if '=' not in item:
                raise ConfigError(f"覆盖项必须是 key=value 形式: {item!r}")
            key, raw = item.split('=', 1)
            key = key.strip()
            if not key:
                raise ConfigError(f"覆盖项缺少键名: {item!r}")
            try:
                value = yaml.safe_load(raw)
            except yaml.YAMLError as e:
                raise ConfigError(f"覆盖项 {key} 的值无法解析: {e}")
            if isinstance(value, str):
                # PyYAML 不把 1e-9 这类无小数点的指数写法识别为浮点
                try:
                    value = float(value)
                except ValueError:
                    pass
            self.set_nested(key, value)
            logging.debug(f"配置覆盖: {key} = {value!r}")

    def __getitem__(self, key: str) -> Any:
        """通过索引获取配置项"""
        return self.config[key]

    def __contains__(self, key: str) -> bool:
        """检查配置项是否存在"""
        return key in self.config


@dataclass
class ExperimentConfig:
    """一次实验运行所需的全部输入（参数已与默认值合并并校验）"""
    experiment: str
    params: Dict[str, Any]
    policy: NumericPolicy
    output_dir: Path
    overridden: List[str] = field(default_factory=list)

    @classmethod
    def build(cls, config: Config, defaults: Mapping[str, Any], randomized: bool,
              experiment: str | None = None) -> "ExperimentConfig":
        """合并 PARAMS 与实验默认参数：未知参数拒绝；随机实验必须显式给出 seed"""
        name = experiment or config.get('EXPERIMENT')
        if not name:
            raise ConfigError("未指定实验（EXPERIMENT 或 --experiment）")
        supplied = dict(config.get('PARAMS') or {})
        unknown = sorted(set(supplied) - set(defaults))
        if unknown:
            raise ConfigError(f"实验 {name} 不认识参数: {', '.join(unknown)}（可用: {', '.join(sorted(defaults))}）")
        if randomized and supplied.get('seed') is None:
            raise ConfigError(f"实验 {name} 含随机抽样，必须给出 seed")
        seed = supplied.get('seed')
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
            raise ConfigError(f"seed 必须是非负整数，实际 {seed!r}")
        params = dict(defaults)
        for key, value in supplied.items():
            expected = defaults[key]
            if isinstance(expected, bool) and not isinstance(value, bool):
                raise ConfigError(f"参数 {key} 需要布尔值，实际 {value!r}")
            if isinstance(expected, (int, float)) and not isinstance(expected, bool):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"参数 {key} 需要数值，实际 {value!r}")
                if isinstance(expected, int) and not isinstance(expected, bool) and not float(value).is_integer():
                    raise ConfigError(f"参数 {key} 需要整数，实际 {value!r}")
                value = type(expected)(value)
            params[key] = value
        try:
            policy = NumericPolicy.from_mapping(config.get('NUMERIC'))
        except ValueError as e:
            raise ConfigError(str(e))
        output_dir = Path(config.get('OUTPUT_DIR') or 'output')
        return cls(name, params, policy, output_dir, sorted(supplied))
