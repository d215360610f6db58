// Static terminal presets in relative pattern coordinates (fractions of
// the pattern bounds), mirroring common sensor configurations.

export interface TerminalPreset {
  name: string;
  points: [number, number][];
}

export const PRESETS: TerminalPreset[] = [
  { name: "two cuffs", points: [[0.25, 0.1], [0.25, 0.9]] },
  {
    name: "four sensors",
    points: [[0.25, 0.1], [0.25, 0.9], [0.15, 0.15], [0.35, 0.85]],
  },
  {
    name: "ring of six",
    points: [
      [0.1, 0.5],
      [0.25, 0.2],
      [0.4, 0.5],
      [0.25, 0.8],
      [0.55, 0.35],
      [0.7, 0.65],
    ],
  },
];
