"""Launcher window and dialogs, driven offscreen"""

import os
import tempfile
import unittest
from pathlib import Path

os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")

try:
    from PyQt6.QtWidgets import QApplication
except ImportError:  # pragma: no cover
    QApplication = None

from src.core.errors import JacobiLabError
from src.core.experiment import EXIT_ERROR, EXIT_OK, EXIT_VIOLATED, ExperimentConfig, list_experiments

if QApplication is not None:
    from src.dialogs.experiment_selection import ExperimentSelectionDialog
    from src.dialogs.run_progress import RunProgressDialog
    from src.main_window import BatchIndicator, MainWindow


@unittest.skipIf(QApplication is None, "PyQt6 not installed")
class TestDialogs(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.app = QApplication.instance() or QApplication([])

    def test_selection(self):
        dialog = ExperimentSelectionDialog(list_experiments())
        self.assertFalse(dialog.run_btn.isEnabled())
        dialog.checkboxes["hardy-suite"].setChecked(True)
        dialog.checkboxes["spectrum-scan"].setChecked(True)
        self.assertTrue(dialog.run_btn.isEnabled())
        self.assertEqual(dialog.get_selected(), ["spectrum-scan", "hardy-suite"])
        dialog._set_all(True)
        self.assertEqual(len(dialog.get_selected()), len(list_experiments()))
        dialog._set_all(False)
        self.assertEqual(dialog.get_selected(), [])
        self.assertEqual(dialog.summary_label.text(), "Experiments to run: 0")

    def test_progress(self):
        dialog = RunProgressDialog(["spectrum-scan", "verify-inequalities"])
        fired = []
        dialog.cancelled.connect(lambda: fired.append(True))
        dialog.start_run(0)
        self.assertIn("running", dialog.run_labels[0].text())
        dialog.finish_run(0, "stabilized")
        dialog.start_run(1)
        dialog.fail_run(1)
        self.assertEqual(dialog.verdicts, {"spectrum-scan": "stabilized", "verify-inequalities": "failed"})
        self.assertEqual(dialog.progress_bar.value(), 2)
        dialog._on_cancel()
        self.assertEqual(fired, [True])


@unittest.skipIf(QApplication is None, "PyQt6 not installed")
class TestMainWindow(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.app = QApplication.instance() or QApplication([])

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.window = MainWindow()
        self.window.output_folder = Path(self._tmp.name)

    def tearDown(self):
        self.window.close()
        self._tmp.cleanup()

    def test_build_configs_from_file(self):
        path = Path(self._tmp.name) / "scan.json"
        ExperimentConfig(experiment="spectrum-scan", grid={"sizes": [10, 100, 1000]}).save(path)
        self.window.set_config_path(path)
        self.window.seed_spin.setValue(5)
        configs = self.window.build_configs(["spectrum-scan", "hardy-suite"])
        self.assertEqual(configs[0].grid["sizes"], [10, 100, 1000])
        self.assertEqual(configs[1].grid["trials"], 1000)
        self.assertEqual({c.seed for c in configs}, {5})

    def test_settings_summary_lists_overrides(self):
        path = Path(self._tmp.name) / "szego.json"
        ExperimentConfig(experiment="szego-scan", family={"kind": "alternating", "gamma": 0.6},
                         tolerances={"szego_delta": 0.05}).save(path)
        self.window.set_config_path(path)
        summary = self.window.settings_panel.config_summary.text()
        self.assertIn("family alternating", summary)
        self.assertIn("szego_delta=0.05", summary)
        self.window.set_config_path(None)
        self.assertIsNone(self.window.settings_panel.selected_config())

    def test_bad_config_file_is_rejected_on_load(self):
        path = Path(self._tmp.name) / "bad.json"
        path.write_text('{"experiment": "no-such-experiment"}')
        with self.assertRaises(JacobiLabError):
            self.window.set_config_path(path)

    def test_batch_outcome(self):
        self.assertEqual(BatchIndicator.outcome([]), "idle")
        self.assertEqual(BatchIndicator.outcome([EXIT_OK, EXIT_OK]), "passed")
        self.assertEqual(BatchIndicator.outcome([EXIT_OK, EXIT_VIOLATED]), "violated")
        self.assertEqual(BatchIndicator.outcome([EXIT_VIOLATED, EXIT_ERROR]), "failed")
        with self.assertRaises(ValueError):
            self.window.indicator.set_state("ready")

    def test_run_batch(self):
        configs = [
            ExperimentConfig(experiment="spectrum-scan", grid={"sizes": [10, 100, 1000]}),
            ExperimentConfig(experiment="spectrum-scan", family={"kind": "alternating", "alpha": 2.0}),
        ]
        statuses = self.window.run_experiments(configs, interactive=False)
        self.assertEqual(statuses, [EXIT_OK, EXIT_ERROR])
        batch = self.window.last_batch
        self.assertEqual(batch.parent, Path(self._tmp.name))
        self.assertTrue((batch / "spectrum-scan" / "summary.json").exists())
        self.assertTrue(self.window.run_btn.isEnabled())
        self.assertEqual(self.window.indicator.state, "failed")

    def test_empty_batch(self):
        self.assertEqual(self.window.run_experiments([], interactive=False), [])
        self.assertEqual(self.window.status_label.text(), "No experiments selected")
        self.assertEqual(self.window.indicator.state, "idle")


if __name__ == '__main__':
    unittest.main()
