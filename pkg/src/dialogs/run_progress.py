"""Progress dialog for experiment runs"""

from typing import List

from PyQt6.QtWidgets import (
    QDialog, QVBoxLayout, QHBoxLayout, QLabel,
    QProgressBar, QPushButton, QFrame
)
from PyQt6.QtCore import Qt, QTimer, pyqtSignal


class RunProgressDialog(QDialog):
    """Dialog showing which experiment runs, which finished and their verdicts"""

    cancelled = pyqtSignal()

    def __init__(self, experiments: List[str], parent=None):
        super().__init__(parent)
        self.setWindowTitle("Running Experiments")
        self.setMinimumWidth(450)
        self.setModal(True)

        self.experiments = experiments
        self.current_index = 0
        self.elapsed = 0.0
        self.verdicts = {}

        self._setup_ui()

        self._elapsed_timer = QTimer(self)
        self._elapsed_timer.timeout.connect(self._update_elapsed)

    def _setup_ui(self):
        layout = QVBoxLayout(self)

        self.title_label = QLabel(f"Experiment 1 of {len(self.experiments)}")
        self.title_label.setStyleSheet("font-size: 16px; font-weight: bold;")
        layout.addWidget(self.title_label)

        layout.addSpacing(10)

        self.progress_bar = QProgressBar()
        self.progress_bar.setMinimum(0)
        self.progress_bar.setMaximum(len(self.experiments))
        self.progress_bar.setValue(0)
        self.progress_bar.setStyleSheet("""
            QProgressBar {
                border: 1px solid #444;
                border-radius: 4px;
                text-align: center;
                height: 25px;
            }
            QProgressBar::chunk {
                background-color: #0a5;
            }
        """)
        layout.addWidget(self.progress_bar)

        self.time_label = QLabel("0:00")
        self.time_label.setAlignment(Qt.AlignmentFlag.AlignCenter)
        layout.addWidget(self.time_label)

        layout.addSpacing(10)

        runs_frame = QFrame()
        runs_frame.setStyleSheet("""
            QFrame {
                background-color: #2a2a2a;
                border-radius: 4px;
                padding: 10px;
            }
        """)
        runs_layout = QVBoxLayout(runs_frame)

        self.run_labels = []
        for name in self.experiments:
            label = QLabel(f"○ {name}")
            label.setStyleSheet("color: #888;")
            self.run_labels.append(label)
            runs_layout.addWidget(label)

        layout.addWidget(runs_frame)

        layout.addSpacing(20)

        button_layout = QHBoxLayout()
        button_layout.addStretch()

        self.cancel_btn = QPushButton("Cancel")
        self.cancel_btn.setToolTip("Stops after the current experiment")
        self.cancel_btn.clicked.connect(self._on_cancel)
        button_layout.addWidget(self.cancel_btn)

        layout.addLayout(button_layout)

    def start_run(self, index: int):
        self.current_index = index
        self.elapsed = 0.0
        self.title_label.setText(f"Experiment {index + 1} of {len(self.experiments)}")

        label = self.run_labels[index]
        label.setText(f"● {self.experiments[index]} running...")
        label.setStyleSheet("color: #0f0;")

        self._elapsed_timer.start(100)

    def _update_elapsed(self):
        self.elapsed += 0.1
        minutes = int(self.elapsed // 60)
        seconds = int(self.elapsed % 60)
        self.time_label.setText(f"{minutes}:{seconds:02d}")

    def finish_run(self, index: int, verdict: str):
        self._elapsed_timer.stop()
        self.verdicts[self.experiments[index]] = verdict
        label = self.run_labels[index]
        label.setText(f"✓ {self.experiments[index]}: {verdict}")
        label.setStyleSheet("color: #f59e0b;" if verdict == "violated" else "color: #0a5;")
        self.progress_bar.setValue(index + 1)

    def fail_run(self, index: int):
        self._elapsed_timer.stop()
        self.verdicts[self.experiments[index]] = "failed"
        label = self.run_labels[index]
        label.setText(f"✗ {self.experiments[index]}: failed")
        label.setStyleSheet("color: #ef4444;")
        self.progress_bar.setValue(index + 1)

    def _on_cancel(self):
        self._elapsed_timer.stop()
        self.cancelled.emit()
        self.reject()

    def all_complete(self):
        self._elapsed_timer.stop()
        self.title_label.setText("Runs Complete!")
        self.progress_bar.setValue(len(self.experiments))
        self.accept()
