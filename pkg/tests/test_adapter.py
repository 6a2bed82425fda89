import json
import sys
import time

import numpy as np
import pytest

from daa.audio import load_wav, save_wav, synth
from daa.errors import AdapterFailed, AdapterProtocol, AdapterSpawn, AdapterTimeout
from daa.processors.adapter import run_external
from daa.processors.types import OutputSlot, ProcessorDescriptor, TaskKind

from conftest import adapter_argv


def descriptor(exec_argv, task=TaskKind.SPEECH_ENHANCEMENT, slots=None, timeout=30.0):
    return ProcessorDescriptor(
        id="test-adapter",
        task=task,
        output_slots=slots or (OutputSlot("audio", "audio"),),
        provenance="external",
        exec_argv=tuple(exec_argv),
        timeout_s=timeout,
    )


@pytest.fixture
def input_wav(tmp_path):
    clip = synth("white_noise", amplitude=0.5, duration_s=0.3, seed=6)
    path = tmp_path / "input.wav"
    save_wav(clip, path, bits="32f")
    return path


class TestAdapterProtocol:
    def test_echo_identity(self, tmp_path, input_wav):
        d = descriptor(adapter_argv("echo_adapter"))
        outputs = run_external(d, [input_wav], {}, tmp_path / "work")
        assert len(outputs) == 1
        assert outputs[0].kind == "audio"
        original = load_wav(input_wav)
        assert np.array_equal(outputs[0].payload.samples, original.samples)

    def test_fixed_text(self, tmp_path, input_wav):
        d = descriptor(adapter_argv("asr_adapter"), task=TaskKind.ASR,
                       slots=(OutputSlot("text", "text"),))
        outputs = run_external(d, [input_wav], {}, tmp_path / "work")
        assert outputs[0].payload == "hello world"

    def test_params_forwarded(self, tmp_path, input_wav):
        d = descriptor(adapter_argv("asr_adapter"), task=TaskKind.ASR,
                       slots=(OutputSlot("text", "text"),))
        outputs = run_external(d, [input_wav], {"text": "salve mundi"}, tmp_path / "work")
        assert outputs[0].payload == "salve mundi"

    def test_labels_payload(self, tmp_path, input_wav):
        d = descriptor(adapter_argv("li_adapter"), task=TaskKind.LANGUAGE_ID,
                       slots=(OutputSlot("labels", "labels"),))
        outputs = run_external(d, [input_wav], {}, tmp_path / "work")
        assert outputs[0].payload[0] == {"label": "en", "score": 0.85}

    def test_failure_carries_stderr_and_exit_code(self, tmp_path, input_wav):
        d = descriptor(adapter_argv("failing_adapter"), task=TaskKind.ASR,
                       slots=(OutputSlot("text", "text"),))
        with pytest.raises(AdapterFailed) as err:
            run_external(d, [input_wav], {}, tmp_path / "work")
        assert err.value.exit_code == 3
        assert "no such model" in err.value.stderr

    def test_timeout_kills_within_double_bound(self, tmp_path, input_wav):
        d = descriptor(adapter_argv("sleepy_adapter"), task=TaskKind.ASR,
                       slots=(OutputSlot("text", "text"),), timeout=1.0)
        started = time.monotonic()
        with pytest.raises(AdapterTimeout):
            run_external(d, [input_wav], {}, tmp_path / "work")
        assert time.monotonic() - started < 2.0

    def test_missing_executable(self, tmp_path, input_wav):
        d = descriptor(["/nonexistent/adapter-binary"])
        with pytest.raises(AdapterSpawn):
            run_external(d, [input_wav], {}, tmp_path / "work")

    def test_unconfigured_executable(self, tmp_path, input_wav):
        d = ProcessorDescriptor(
            id="metadata-only", task=TaskKind.ASR,
            output_slots=(OutputSlot("text", "text"),), provenance="external",
        )
        with pytest.raises(AdapterSpawn):
            run_external(d, [input_wav], {}, tmp_path / "work")

    def test_malformed_result(self, tmp_path, input_wav):
        bad = tmp_path / "bad.py"
        bad.write_text("import sys; sys.stdin.readline(); print('not json')\n")
        d = descriptor([sys.executable, str(bad)], task=TaskKind.ASR,
                       slots=(OutputSlot("text", "text"),))
        with pytest.raises(AdapterProtocol):
            run_external(d, [input_wav], {}, tmp_path / "work")

    def test_wrong_slot_kind_rejected(self, tmp_path, input_wav):
        bad = tmp_path / "wrongkind.py"
        bad.write_text(
            "import sys, json\n"
            "sys.stdin.readline()\n"
            "print(json.dumps({'outputs': [{'slot': 'text', 'kind': 'labels', 'labels': []}]}))\n"
        )
        d = descriptor([sys.executable, str(bad)], task=TaskKind.ASR,
                       slots=(OutputSlot("text", "text"),))
        with pytest.raises(AdapterProtocol):
            run_external(d, [input_wav], {}, tmp_path / "work")

    def test_arity_enforced(self, tmp_path, input_wav):
        bad = tmp_path / "extra.py"
        bad.write_text(
            "import sys, json\n"
            "sys.stdin.readline()\n"
            "print(json.dumps({'outputs': ["
            "{'slot': 'text', 'kind': 'text', 'text': 'a'},"
            "{'slot': 'other', 'kind': 'text', 'text': 'b'}]}))\n"
        )
        d = descriptor([sys.executable, str(bad)], task=TaskKind.ASR,
                       slots=(OutputSlot("text", "text"),))
        with pytest.raises(AdapterProtocol):
            run_external(d, [input_wav], {}, tmp_path / "work")

    def test_required_sample_rate_resamples_at_dispatch(self, tmp_path, input_wav):
        """A processor declaring its rate receives resampled input."""
        from daa.pipeline.engine import ArtifactStore, run_step
        from daa.pipeline.spec import InputBinding, StepSpec
        from daa.processors.registry import Registry, builtin_descriptors

        spy = tmp_path / "rate_spy.py"
        spy.write_text(
            "import sys, json, struct\n"
            "job = json.loads(sys.stdin.readline())\n"
            "raw = open(job['inputs'][0], 'rb').read()\n"
            "rate = struct.unpack_from('<I', raw, 24)[0]\n"
            "print(json.dumps({'outputs': [{'slot': 'text', 'kind': 'text',"
            " 'text': str(rate)}]}))\n"
        )
        d = ProcessorDescriptor(
            id="asr-8k", task=TaskKind.ASR,
            output_slots=(OutputSlot("text", "text"),), provenance="external",
            required_sample_rate=8000,
            exec_argv=(sys.executable, str(spy)), timeout_s=30.0,
        )
        registry = Registry(builtin_descriptors() + [d])
        step = StepSpec("t", TaskKind.ASR, "asr-8k", inputs=(InputBinding(source=0),))
        clip = load_wav(input_wav)  # 16 kHz fixture
        assert clip.sample_rate == 16000
        doc, outputs = run_step(step, [clip], registry,
                                ArtifactStore(tmp_path / "store"), tmp_path / "w")
        assert doc["status"] == "done"
        assert outputs[0].payload == "8000"

    def test_job_object_contents(self, tmp_path, input_wav):
        spy = tmp_path / "spy.py"
        spy.write_text(
            "import sys, json\n"
            "job = json.loads(sys.stdin.readline())\n"
            "assert job['protocol'] == 1\n"
            "assert job['task'] == 'ASR'\n"
            "assert job['model_id'] == 'test-adapter'\n"
            "import os\n"
            "assert all(os.path.isabs(p) for p in job['inputs'])\n"
            "print(json.dumps({'outputs': [{'slot': 'text', 'kind': 'text',"
            " 'text': job['params']['x']}]}))\n"
        )
        d = descriptor([sys.executable, str(spy)], task=TaskKind.ASR,
                       slots=(OutputSlot("text", "text"),))
        outputs = run_external(d, [input_wav], {"x": "42"}, tmp_path / "work")
        assert outputs[0].payload == "42"
