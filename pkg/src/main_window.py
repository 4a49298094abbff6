"""Main application window - experiment launcher"""

import threading
import time
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from PyQt6.QtWidgets import (
    QApplication, QMainWindow, QWidget, QVBoxLayout, QHBoxLayout,
    QLabel, QPushButton, QComboBox, QSpinBox, QFileDialog, QFrame,
    QMessageBox, QGridLayout
)
from PyQt6.QtCore import Qt, QUrl, pyqtSignal
from PyQt6.QtGui import QFont, QPainter, QColor, QDesktopServices

from .dialogs.experiment_selection import ExperimentSelectionDialog
from .dialogs.run_progress import RunProgressDialog
from .core.errors import JacobiLabError
from .core.experiment import (DEFAULT_TOLERANCES, EXIT_ERROR, EXIT_VIOLATED, ExperimentConfig, ExperimentRun,
                              default_output_folder, list_experiments)


# ============================================================================
# Custom Widgets
# ============================================================================

class BatchIndicator(QWidget):
    """Dot in the footer showing how the last batch ended"""

    COLORS = {
        "idle": "#505050",
        "running": "#f59e0b",
        "passed": "#4ade80",
        "violated": "#ef4444",
        "failed": "#a855f7",
    }

    def __init__(self, parent=None):
        super().__init__(parent)
        self.setFixedSize(10, 10)
        self.state = "idle"

    def set_state(self, state: str):
        if state not in self.COLORS:
            raise ValueError(f"unknown batch state '{state}'")
        self.state = state
        self.setToolTip(state)
        self.update()

    @staticmethod
    def outcome(statuses: List[int]) -> str:
        if any(s == EXIT_ERROR for s in statuses):
            return "failed"
        if any(s == EXIT_VIOLATED for s in statuses):
            return "violated"
        return "passed" if statuses else "idle"

    def paintEvent(self, event):
        painter = QPainter(self)
        painter.setRenderHint(QPainter.RenderHint.Antialiasing)
        painter.setBrush(QColor(self.COLORS[self.state]))
        painter.setPen(Qt.PenStyle.NoPen)
        painter.drawEllipse(self.rect())


class RunSettingsPanel(QFrame):
    """Threads, seed and the config file a batch starts from"""

    config_requested = pyqtSignal()

    def __init__(self, parent=None):
        super().__init__(parent)
        self.setObjectName("runSettings")
        self.setStyleSheet("""
            QFrame#runSettings {
                background: #1a1a1a;
                border: 1px solid #333;
                border-radius: 6px;
            }
            QComboBox {
                background: #252525;
                color: #e0e0e0;
                border: 1px solid #444;
                padding: 3px 8px;
            }
            QComboBox QAbstractItemView {
                background: #252525;
                color: #e0e0e0;
                selection-background-color: #444;
            }
        """)

        grid = QGridLayout(self)
        grid.setContentsMargins(16, 12, 16, 12)
        grid.setSpacing(12)

        grid.addWidget(QLabel("Threads"), 0, 0)
        self.threads_spin = QSpinBox()
        self.threads_spin.setRange(1, 64)
        self.threads_spin.setToolTip("grid points run concurrently, output order is unchanged")
        grid.addWidget(self.threads_spin, 0, 1)

        grid.addWidget(QLabel("Seed"), 0, 2)
        self.seed_spin = QSpinBox()
        self.seed_spin.setRange(0, 2 ** 31 - 1)
        grid.addWidget(self.seed_spin, 0, 3)

        grid.addWidget(QLabel("Config"), 1, 0)
        self.config_combo = QComboBox()
        self.config_combo.addItem("Defaults", None)
        grid.addWidget(self.config_combo, 1, 1, 1, 2)

        load_btn = QPushButton("Load...")
        load_btn.clicked.connect(lambda: self.config_requested.emit())
        grid.addWidget(load_btn, 1, 3)

        self.config_summary = QLabel()
        self.config_summary.setWordWrap(True)
        self.config_summary.setStyleSheet("color: #808080; font-size: 11px; border: none;")
        grid.addWidget(self.config_summary, 2, 0, 1, 4)
        self.show_config(None)

    def show_config(self, config: Optional[ExperimentConfig], name: str = ""):
        """List the loaded file and its tolerance overrides"""
        self.config_combo.clear()
        self.config_combo.addItem("Defaults", None)
        if config is None:
            self.config_summary.setText("Every experiment runs on its default family and grid")
            return
        self.config_combo.addItem(name, config)
        self.config_combo.setCurrentIndex(1)
        family = config.family.get("kind", "default")
        changed = sorted(k for k, v in config.tolerances.items() if DEFAULT_TOLERANCES.get(k) != v)
        overrides = ", ".join(f"{k}={config.tolerances[k]:g}" for k in changed) or "none"
        self.config_summary.setText(f"{config.experiment}: family {family}, tolerance overrides {overrides}")

    def selected_config(self) -> Optional[ExperimentConfig]:
        return self.config_combo.currentData()


# ============================================================================
# Main Window
# ============================================================================

class MainWindow(QMainWindow):
    """Main application window"""

    def __init__(self):
        super().__init__()
        self.setWindowTitle("Oscillatory Jacobi Lab")
        self.setMinimumSize(560, 520)

        self.output_folder = default_output_folder()
        self.config_path: Optional[Path] = None
        self.running = False
        self.last_batch: Optional[Path] = None

        self._setup_ui()
        self._update_status("Ready")

    def _setup_ui(self):
        """Build the UI"""
        central = QWidget()
        self.setCentralWidget(central)
        layout = QVBoxLayout(central)
        layout.setSpacing(12)
        layout.setContentsMargins(20, 20, 20, 20)

        # ===== Header =====
        title = QLabel("OSCILLATORY JACOBI LAB")
        title.setFont(QFont("IBM Plex Mono", 12, QFont.Weight.Bold))
        title.setStyleSheet("letter-spacing: 2px;")
        layout.addWidget(title)

        sep = QFrame()
        sep.setFrameShape(QFrame.Shape.HLine)
        sep.setStyleSheet("background: #333;")
        sep.setFixedHeight(1)
        layout.addWidget(sep)

        # ===== Run settings =====
        self.settings_panel = RunSettingsPanel()
        self.settings_panel.config_requested.connect(self._browse_config)
        self.threads_spin = self.settings_panel.threads_spin
        self.seed_spin = self.settings_panel.seed_spin
        layout.addWidget(self.settings_panel)

        # ===== Catalog panel =====
        catalog_panel = QFrame()
        catalog_panel.setStyleSheet("""
            QFrame {
                background: #1a1a1a;
                border: 1px solid #333;
                border-radius: 8px;
            }
        """)
        catalog_layout = QVBoxLayout(catalog_panel)
        catalog_layout.setContentsMargins(0, 0, 0, 0)
        catalog_layout.setSpacing(0)

        # Output path bar
        output_bar = QFrame()
        output_bar.setStyleSheet("""
            QFrame {
                background: #252525;
                border: none;
                border-bottom: 1px solid #333;
                border-radius: 0;
            }
        """)
        output_layout = QHBoxLayout(output_bar)
        output_layout.setContentsMargins(16, 10, 16, 10)

        self.output_path_label = QLabel(str(self.output_folder))
        self.output_path_label.setStyleSheet("color: #808080; font-size: 11px;")
        output_layout.addWidget(self.output_path_label, 1)

        browse_btn = QPushButton("Browse")
        browse_btn.setStyleSheet("""
            QPushButton {
                background: transparent;
                border: 1px solid #444;
                padding: 4px 12px;
                color: #808080;
                font-size: 11px;
            }
            QPushButton:hover {
                border-color: #666;
                color: #fff;
            }
        """)
        browse_btn.clicked.connect(self._browse_folder)
        output_layout.addWidget(browse_btn)
        catalog_layout.addWidget(output_bar)

        entries = QVBoxLayout()
        entries.setContentsMargins(16, 12, 16, 12)
        for entry in list_experiments():
            name = QLabel(entry["name"])
            name.setStyleSheet("color: #e0e0e0; font-weight: bold; border: none;")
            entries.addWidget(name)
            description = QLabel(entry["description"])
            description.setWordWrap(True)
            description.setStyleSheet("color: #808080; font-size: 11px; border: none;")
            entries.addWidget(description)
        catalog_layout.addLayout(entries)
        layout.addWidget(catalog_panel, 1)

        # ===== Run button =====
        self.run_btn = QPushButton("Run Experiments...")
        self.run_btn.setStyleSheet("""
            QPushButton {
                background-color: #0a5;
                color: white;
                padding: 10px 20px;
                border: none;
                border-radius: 4px;
                font-weight: bold;
            }
            QPushButton:hover {
                background-color: #0b6;
            }
            QPushButton:disabled {
                background-color: #333;
                color: #666;
            }
        """)
        self.run_btn.clicked.connect(self._choose_and_run)
        layout.addWidget(self.run_btn)

        # ===== Status footer =====
        footer = QHBoxLayout()
        self.indicator = BatchIndicator()
        footer.addWidget(self.indicator)
        self.status_label = QLabel()
        self.status_label.setStyleSheet("color: #808080; font-size: 11px;")
        footer.addWidget(self.status_label, 1)
        layout.addLayout(footer)

    def _update_status(self, message: str, state: str = "idle"):
        """Update status footer"""
        self.status_label.setText(message)
        self.indicator.set_state(state)

    def _browse_folder(self):
        """Open folder selection dialog"""
        folder = QFileDialog.getExistingDirectory(
            self, "Select Output Folder", str(self.output_folder)
        )
        if folder:
            self.output_folder = Path(folder)
            self.output_path_label.setText(str(self.output_folder))

    def _browse_config(self):
        path, _ = QFileDialog.getOpenFileName(self, "Load Experiment Config", str(Path.cwd()), "JSON (*.json)")
        if not path:
            return
        try:
            self.set_config_path(Path(path))
        except JacobiLabError as e:
            self._show_error(str(e))

    def set_config_path(self, path: Optional[Path]):
        """Load a config file up front so a bad file is reported before any run starts"""
        config = ExperimentConfig.load(path) if path is not None else None
        self.config_path = path
        self.settings_panel.show_config(config, path.name if path is not None else "")

    # ------------------------------------------------------------------
    # running
    # ------------------------------------------------------------------

    def build_configs(self, experiments: List[str]) -> List[ExperimentConfig]:
        """One config per selected experiment: the loaded file where it matches, defaults otherwise"""
        loaded = self.settings_panel.selected_config()
        configs = []
        for name in experiments:
            if loaded is not None and loaded.experiment == name:
                data = loaded.to_dict()
            else:
                data = {"experiment": name}
            data["seed"] = self.seed_spin.value()
            configs.append(ExperimentConfig.from_dict(data))
        return configs

    def _choose_and_run(self):
        dialog = ExperimentSelectionDialog(list_experiments(), self)
        if not dialog.exec():
            return
        try:
            configs = self.build_configs(dialog.get_selected())
        except JacobiLabError as e:
            self._show_error(str(e))
            return
        self.run_experiments(configs)

    def run_experiments(self, configs: List[ExperimentConfig], interactive: bool = True) -> List[int]:
        """Run configs one after another on a worker thread, keeping the UI responsive"""
        if not configs:
            self._update_status("No experiments selected")
            return []

        batch = self.output_folder / f"batch_{datetime.now().strftime('%Y%m%d_%H%M%S')}"
        progress = RunProgressDialog([c.experiment for c in configs], self)

        cancelled = False

        def on_cancel():
            nonlocal cancelled
            cancelled = True

        progress.cancelled.connect(on_cancel)
        progress.show()
        QApplication.processEvents()

        self.running = True
        self.run_btn.setEnabled(False)
        self._update_status("Running...", "running")
        statuses = []

        for i, config in enumerate(configs):
            if cancelled:
                break
            progress.start_run(i)
            QApplication.processEvents()

            config.output_path = config.output_path or str(batch / config.experiment)
            run = ExperimentRun(config, threads=self.threads_spin.value())
            status = self._execute_with_events(run)
            statuses.append(status)

            if status == EXIT_ERROR:
                progress.fail_run(i)
                if interactive:
                    self._show_error(f"{config.experiment} failed, see the log for details")
            else:
                progress.finish_run(i, run.result.verdict)
            QApplication.processEvents()

        if not cancelled:
            progress.all_complete()

        self.running = False
        self.run_btn.setEnabled(True)
        self.last_batch = batch
        outcome = BatchIndicator.outcome(statuses)
        self._update_status(f"{len(statuses)} run(s) {outcome}, saved to {batch.name}", outcome)

        if interactive and batch.exists():
            reply = QMessageBox.question(
                self,
                "Runs Complete",
                "All runs finished.\n\nOpen folder?",
                QMessageBox.StandardButton.Yes | QMessageBox.StandardButton.No
            )
            if reply == QMessageBox.StandardButton.Yes:
                QDesktopServices.openUrl(QUrl.fromLocalFile(str(batch)))
        return statuses

    def _execute_with_events(self, run: ExperimentRun) -> int:
        done = threading.Event()
        outcome = {}

        def work():
            try:
                outcome["status"] = run.execute()
            finally:
                done.set()

        worker = threading.Thread(target=work, daemon=True)
        worker.start()
        while not done.is_set():
            QApplication.processEvents()
            time.sleep(0.05)
        worker.join()
        return outcome.get("status", EXIT_ERROR)

    def _show_error(self, message: str):
        """Show error message"""
        QMessageBox.critical(self, "Error", message)
        self._update_status(f"Error: {message}", "failed")

    def closeEvent(self, event):
        """Handle window close"""
        if self.running:
            reply = QMessageBox.question(
                self,
                "Run in Progress",
                "An experiment is running. Exit anyway?",
                QMessageBox.StandardButton.Yes | QMessageBox.StandardButton.No
            )
            if reply == QMessageBox.StandardButton.No:
                event.ignore()
                return
        event.accept()
