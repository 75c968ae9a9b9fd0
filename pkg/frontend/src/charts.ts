/** Chart builders for the session results document.
 *
 * Both charts render straight from gateway payload fields; the only
 * arithmetic here is presentational (renormalizing the five mean values so
 * pie segments total 100%). Each builder returns a view model plus an SVG
 * string so tests can assert the numbers without a DOM.
 */

import { EMOTION_LABELS, type EmotionLabel, type EmotionScores, type QuestionResult } from "./types.js";

export const EMOTION_COLORS: Record<EmotionLabel, string> = {
  joy: "#f4b400",
  anger: "#d93025",
  sadness: "#4285f4",
  fear: "#9334e6",
  disgust: "#188038",
};

export interface PieSegment {
  label: EmotionLabel;
  value: number; // raw mean value as delivered by the gateway
  percent: number; // renormalized share of the five emotions
  color: string;
}

export type PieChart =
  | { kind: "pie"; segments: PieSegment[]; svg: string }
  | { kind: "placeholder"; message: string; svg: string };

export interface BarGroup {
  position: number;
  label: string;
  bars: { label: EmotionLabel; value: number; color: string }[] | null; // null = no response
}

export type SeriesChart =
  | { kind: "series"; groups: BarGroup[]; svg: string }
  | { kind: "placeholder"; message: string; svg: string };

function placeholderSvg(message: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 320 120" class="placeholder">` +
    `<text x="160" y="64" text-anchor="middle" fill="#888">${escapeXml(message)}</text></svg>`
  );
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function polar(cx: number, cy: number, r: number, angle: number): [number, number] {
  return [cx + r * Math.cos(angle), cy + r * Math.sin(angle)];
}

/** Pie of the five mean emotion fields, renormalized to 100%. */
export function renderMeanPie(mean: EmotionScores | null): PieChart {
  if (mean === null) {
    return { kind: "placeholder", message: "no scored answers", svg: placeholderSvg("no scored answers") };
  }
  const total = EMOTION_LABELS.reduce((acc, label) => acc + mean[label], 0);
  if (total <= 0) {
    return { kind: "placeholder", message: "no emotion signal", svg: placeholderSvg("no emotion signal") };
  }
  const segments: PieSegment[] = EMOTION_LABELS.map((label) => ({
    label,
    value: mean[label],
    percent: (mean[label] / total) * 100,
    color: EMOTION_COLORS[label],
  }));

  const cx = 105, cy = 105, r = 95;
  const parts: string[] = [];
  let angle = -Math.PI / 2;
  for (const segment of segments) {
    const sweep = (segment.percent / 100) * 2 * Math.PI;
    if (sweep <= 0) continue;
    const mid = angle + sweep / 2;
    if (segment.percent >= 99.999) {
      parts.push(`<circle cx="${cx}" cy="${cy}" r="${r}" fill="${segment.color}"><title>${segment.label} 100%</title></circle>`);
    } else {
      const [x0, y0] = polar(cx, cy, r, angle);
      const [x1, y1] = polar(cx, cy, r, angle + sweep);
      const largeArc = sweep > Math.PI ? 1 : 0;
      parts.push(
        `<path d="M ${cx} ${cy} L ${x0.toFixed(3)} ${y0.toFixed(3)} ` +
          `A ${r} ${r} 0 ${largeArc} 1 ${x1.toFixed(3)} ${y1.toFixed(3)} Z" fill="${segment.color}">` +
          `<title>${segment.label} ${segment.percent.toFixed(1)}%</title></path>`,
      );
    }
    if (segment.percent >= 4) {
      const [lx, ly] = polar(cx, cy, r * 0.62, mid);
      parts.push(
        `<text x="${lx.toFixed(1)}" y="${ly.toFixed(1)}" text-anchor="middle" ` +
          `fill="#fff" font-size="11">${Math.round(segment.percent)}%</text>`,
      );
    }
    angle += sweep;
  }
  const legend = segments
    .map(
      (s, i) =>
        `<rect x="225" y="${18 + i * 22}" width="12" height="12" fill="${s.color}"/>` +
        `<text x="242" y="${29 + i * 22}" font-size="12" fill="#333">${s.label} ${s.percent.toFixed(1)}%</text>`,
    )
    .join("");
  const svg =
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 360 215" class="mean-pie">` +
    parts.join("") + legend + `</svg>`;
  return { kind: "pie", segments, svg };
}

/** Grouped bars, one group per question, one bar per emotion; unanswered
 * questions render as labeled gaps. */
export function renderQuestionSeries(questions: QuestionResult[]): SeriesChart {
  if (questions.length === 0) {
    return { kind: "placeholder", message: "no questions", svg: placeholderSvg("no questions") };
  }
  const groups: BarGroup[] = questions.map((q) => ({
    position: q.position,
    label: `q${q.position + 1}`,
    bars:
      q.emotion === null
        ? null
        : EMOTION_LABELS.map((label) => ({
            label,
            value: q.emotion![label],
            color: EMOTION_COLORS[label],
          })),
  }));

  const barWidth = 14, barGap = 3, groupGap = 26;
  const groupWidth = EMOTION_LABELS.length * (barWidth + barGap);
  const left = 36, top = 12, plotHeight = 150;
  const width = left + groups.length * (groupWidth + groupGap) + 10;
  const height = top + plotHeight + 40;

  const parts: string[] = [];
  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    const y = top + plotHeight * (1 - tick);
    parts.push(`<line x1="${left - 4}" y1="${y}" x2="${width - 6}" y2="${y}" stroke="#ddd"/>`);
    parts.push(`<text x="${left - 8}" y="${y + 4}" text-anchor="end" font-size="10" fill="#777">${tick}</text>`);
  }
  groups.forEach((group, gi) => {
    const gx = left + gi * (groupWidth + groupGap);
    if (group.bars === null) {
      parts.push(
        `<rect x="${gx}" y="${top}" width="${groupWidth}" height="${plotHeight}" ` +
          `fill="none" stroke="#bbb" stroke-dasharray="4 3"/>`,
      );
      parts.push(
        `<text x="${gx + groupWidth / 2}" y="${top + plotHeight / 2}" text-anchor="middle" ` +
          `font-size="10" fill="#999" class="gap">no response</text>`,
      );
    } else {
      group.bars.forEach((bar, bi) => {
        const h = plotHeight * Math.max(0, Math.min(1, bar.value));
        const x = gx + bi * (barWidth + barGap);
        parts.push(
          `<rect x="${x}" y="${(top + plotHeight - h).toFixed(2)}" width="${barWidth}" ` +
            `height="${h.toFixed(2)}" fill="${bar.color}"><title>${group.label} ${bar.label} ` +
            `${bar.value.toFixed(2)}</title></rect>`,
        );
      });
    }
    parts.push(
      `<text x="${gx + groupWidth / 2}" y="${top + plotHeight + 16}" text-anchor="middle" ` +
        `font-size="12" fill="#333">${group.label}</text>`,
    );
  });
  const legend = EMOTION_LABELS.map(
    (label, i) =>
      `<rect x="${left + i * 70}" y="${height - 14}" width="10" height="10" fill="${EMOTION_COLORS[label]}"/>` +
      `<text x="${left + i * 70 + 14}" y="${height - 5}" font-size="10" fill="#333">${label}</text>`,
  ).join("");
  const svg =
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="question-series">` +
    parts.join("") + legend + `</svg>`;
  return { kind: "series", groups, svg };
}
