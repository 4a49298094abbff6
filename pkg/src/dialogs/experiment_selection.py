"""Experiment selection dialog"""

from typing import List

from PyQt6.QtWidgets import (
    QDialog, QVBoxLayout, QHBoxLayout, QLabel,
    QCheckBox, QPushButton, QFrame
)


class ExperimentSelectionDialog(QDialog):
    """Dialog for selecting which experiments to run"""

    def __init__(self, catalog: List[dict], parent=None):
        super().__init__(parent)
        self.setWindowTitle("Select Experiments")
        self.setMinimumWidth(520)

        self.catalog = catalog
        self.checkboxes = {}

        self._setup_ui()

    def _setup_ui(self):
        layout = QVBoxLayout(self)

        heading = QLabel("Experiments")
        heading.setStyleSheet("font-size: 16px; font-weight: bold;")
        layout.addWidget(heading)

        instructions = QLabel(
            "Checked experiments run in order with the current config.\n"
            "Each one writes a CSV and summary.json into its own folder."
        )
        instructions.setStyleSheet("color: #aaa;")
        layout.addWidget(instructions)

        layout.addSpacing(10)

        entries_frame = QFrame()
        entries_frame.setStyleSheet("""
            QFrame {
                background-color: #2a2a2a;
                border-radius: 4px;
                padding: 15px;
            }
            QCheckBox {
                spacing: 8px;
            }
            QCheckBox::indicator {
                width: 18px;
                height: 18px;
            }
        """)
        entries_layout = QVBoxLayout(entries_frame)

        for entry in self.catalog:
            checkbox = QCheckBox(entry["name"])
            checkbox.setStyleSheet("color: white; font-size: 14px;")
            checkbox.setToolTip(entry["exercises"])
            self.checkboxes[entry["name"]] = checkbox
            entries_layout.addWidget(checkbox)

            detail = QLabel(entry["description"])
            detail.setWordWrap(True)
            detail.setStyleSheet("color: #888; font-size: 12px; padding: 0 0 6px 26px;")
            entries_layout.addWidget(detail)

        layout.addWidget(entries_frame)

        quick_layout = QHBoxLayout()

        select_all = QPushButton("Select All")
        select_all.clicked.connect(lambda: self._set_all(True))
        quick_layout.addWidget(select_all)

        select_none = QPushButton("Select None")
        select_none.clicked.connect(lambda: self._set_all(False))
        quick_layout.addWidget(select_none)

        quick_layout.addStretch()
        layout.addLayout(quick_layout)

        layout.addSpacing(10)

        self.summary_label = QLabel()
        layout.addWidget(self.summary_label)

        layout.addSpacing(20)

        button_layout = QHBoxLayout()
        button_layout.addStretch()

        cancel_btn = QPushButton("Cancel")
        cancel_btn.clicked.connect(self.reject)
        button_layout.addWidget(cancel_btn)

        self.run_btn = QPushButton("Start Runs")
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
        self.run_btn.clicked.connect(self.accept)
        button_layout.addWidget(self.run_btn)

        layout.addLayout(button_layout)

        # connect after run_btn exists
        for cb in self.checkboxes.values():
            cb.stateChanged.connect(self._update_summary)
        self._update_summary()

    def _set_all(self, checked: bool):
        for cb in self.checkboxes.values():
            cb.setChecked(checked)

    def _update_summary(self):
        count = sum(1 for cb in self.checkboxes.values() if cb.isChecked())
        self.summary_label.setText(f"Experiments to run: {count}")
        self.run_btn.setEnabled(count > 0)

    def get_selected(self) -> List[str]:
        """Checked experiments in catalog order"""
        return [name for name, cb in self.checkboxes.items() if cb.isChecked()]
