"""From raw radar baseband to a respiration amplitude envelope.

Builds a complex IQ echo whose phase encodes a known chest displacement,
then walks it through the three pipeline stages:

  1. phase unwrapping  -> displacement in mm
  2. bandpass           -> slow drift and jitter removed
  3. sliding RMS        -> amplitude envelope

Writes plots to demos/output/ and prints the envelope level during normal
breathing versus the simulated apnea, which is the contrast the detector
feeds to the mixture model.
"""

import pathlib

import numpy as np

from apnearadar import (
    ComplexEchoSeries,
    amplitude_envelope,
    bandpass_respiration,
    extract_displacement,
    generate_scenario,
    reference_scenario,
)
from apnearadar.pipeline import DEFAULT_WAVELENGTH_MM
from apnearadar.plots import plot_series

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def main() -> None:
    # A 100 s benchmark scenario: breathing, apnea, a movement burst,
    # breathing again.  We add a slow 30 mm drift before modulating the
    # carrier so the bandpass stage has something to remove.
    displacement, truth = generate_scenario(reference_scenario())
    drift = np.linspace(0.0, 30.0, displacement.values.size)
    dirty = displacement.values + drift

    phase = 4.0 * np.pi * dirty / DEFAULT_WAVELENGTH_MM
    echo = ComplexEchoSeries(
        np.exp(1j * phase), displacement.sample_rate, DEFAULT_WAVELENGTH_MM
    )

    recovered = extract_displacement(echo)
    print(f"stage 1: unwrapped {recovered.values.size} samples "
          f"spanning {recovered.duration:.0f} s")

    filtered = bandpass_respiration(recovered)
    residual = np.ptp(filtered.values[430:570])
    print(f"stage 2: bandpass; residual swing inside the apnea "
          f"{residual:.3f} mm (drift was 30 mm)")

    envelope = amplitude_envelope(filtered)
    normal_level = float(np.median(envelope.values[100:350]))
    apnea_level = float(np.median(envelope.values[430:570]))
    print(f"stage 3: envelope; normal {normal_level:.3f} mm vs "
          f"apnea {apnea_level:.3f} mm "
          f"(ratio {apnea_level / normal_level:.2f})")

    plot_series(
        [("raw unwrap", recovered), ("bandpassed", filtered)],
        OUT / "pipeline_displacement.svg",
        title="displacement before and after bandpass",
        ylabel="mm",
    )
    plot_series(
        [("envelope", envelope), ("truth", truth)],
        OUT / "pipeline_envelope.svg",
        title="amplitude envelope with the true apnea mask",
        ylabel="mm",
    )
    print(f"plots written to {OUT}")


if __name__ == "__main__":
    main()
