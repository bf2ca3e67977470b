// Display formatting only; numbers always originate in service responses.

export function kwhText(value: number | null): string {
  return value === null ? "–" : `${value.toFixed(1)} kWh`;
}

export function kwText(watts: number | null): string {
  return watts === null ? "–" : `${(watts / 1000).toFixed(1)} kW`;
}

export function clockLabel(isoInstant: string): string {
  return isoInstant.slice(11, 16);
}

export function dayLabel(isoDate: string): string {
  const weekdays = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];
  const d = new Date(isoDate + "T00:00:00Z");
  return `${weekdays[d.getUTCDay() === 0 ? 6 : d.getUTCDay() - 1]} ${isoDate.slice(5)}`;
}
