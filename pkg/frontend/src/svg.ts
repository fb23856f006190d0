/** Minimal SVG string assembly. */

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  rect(x: number, y: number, w: number, h: number, attrs: Record<string, string | number> = {}): void {
    this.parts.push(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}"${attrStr(attrs)}/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Record<string, string | number> = {}): void {
    this.parts.push(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}"${attrStr(attrs)}/>`);
  }

  polyline(points: [number, number][], attrs: Record<string, string | number> = {}): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline points="${pts}" fill="none"${attrStr(attrs)}/>`);
  }

  text(x: number, y: number, content: string, attrs: Record<string, string | number> = {}): void {
    this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}"${attrStr(attrs)}>${escapeXml(content)}</text>`);
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}" font-family="sans-serif">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(2);
}

function attrStr(attrs: Record<string, string | number>): string {
  const s = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
  return s;
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
